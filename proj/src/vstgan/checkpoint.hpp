/* Copyright (c) 2026 The vstgan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vstgan/adam.hpp"
#include "vstgan/config.hpp"
#include "vstgan/encoders.hpp"
#include "vstgan/generator.hpp"

namespace vst {

// Binary layout (all integers little-endian):
//   "VSTG" | u32 version | u64 seed | u64 config_len | config bytes |
//   u32 count | count x (u32 name_len | name | u8 dtype | u32 rank | rank x u64 dim) |
//   payloads in manifest order, IEEE-754 little-endian.
// Tensors are listed in lexicographic name order.
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 1;
inline constexpr std::uint8_t kDtypeF64 = 2;

struct Checkpoint {
  std::uint64_t seed = 0;
  std::string config_text;
  ParamSet tensors;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// A trained generator together with the frozen encoder it was trained on.
struct Model {
  TrainConfig config;
  EncoderSpec encoder;
  GeneratorParams generator;
};

Checkpoint to_checkpoint(const Model& model);
Model from_checkpoint(const Checkpoint& checkpoint);

}  // namespace vst
