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
#include <string>
#include <string_view>

#include "vstgan/adam.hpp"
#include "vstgan/evolvesync.hpp"

namespace vst {

struct MdanSettings {
  int iterations = 3000;   // pixel steps per segment
  int segment = 3;         // frames of X' optimized together
  int anchors = 2;         // trailing frames of the previous segment held fixed
  int d_steps = 1;         // discriminator updates per pixel step
};

struct GanSettings {
  int iterations = 20000;
  int batch = 3;           // consecutive frames per training window
  int d_steps = 1;         // discriminator updates per generator step
  bool recurrent = true;   // false freezes W_h at zero
};

struct TrainConfig {
  std::uint64_t seed = 1;
  std::uint64_t encoder_seed = 20190419;
  LossWeights loss;
  KernelSpec kernel;
  AdamSettings adam;
  MdanSettings mdan;
  GanSettings gan;

  void validate() const;
};

// Flat `key = value` text grouped under `[section]` headers; `#` starts a
// comment. Unknown sections or keys are errors.
TrainConfig parse_config(std::string_view text, const TrainConfig& base = {});
TrainConfig load_config(const std::filesystem::path& path, const TrainConfig& base = {});
std::string to_config_text(const TrainConfig& config);

// Sets one `section.key` entry from its textual value.
void set_config_value(TrainConfig& config, std::string_view dotted_key, std::string_view value);

// Deterministic per-purpose seed derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace vst
