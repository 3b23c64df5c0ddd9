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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vstgan/adam.hpp"
#include "vstgan/graph.hpp"

namespace vst {

// Output points of the frozen encoder stack. kMacro doubles as the style tap
// (feeds the discriminator); kGenEnc feeds the generator's decoder.
enum class Tap { kMicro, kMacro, kGenEnc, kContent };

inline constexpr Tap kStyleTap = Tap::kMacro;

Tap parse_tap(std::string_view name);
std::string_view tap_name(Tap tap);

struct ConvLayer {
  Tensor weight;  // [out, in, 3, 3]
  Tensor bias;    // [out]
  std::size_t stride = 1;
};

struct EncoderSpec {
  std::uint64_t seed = 0;
  std::vector<ConvLayer> layers;

  std::size_t channels(Tap tap) const;
};

// conv3x3x16 -> conv3x3/2x32 (macro) -> conv3x3/2x48 (gen-enc) -> conv3x3/2x64
// (content), ReLU after each, He-normal weights, zero biases.
EncoderSpec build_encoder(std::uint64_t seed);

// Serialized form used inside checkpoints ("enc.<layer>.weight" / ".bias").
ParamSet encoder_tensors(const EncoderSpec& spec);
EncoderSpec encoder_from_tensors(std::uint64_t seed, const ParamSet& tensors);

struct EncodedFrame {
  Var micro;
  std::optional<Var> macro;
  std::optional<Var> gen_enc;
  std::optional<Var> content;

  Var at(Tap tap) const;
};

// Encoder weights recorded once as constants in a graph. Gradients flow to
// the frame, never to the weights.
class BoundEncoder {
 public:
  BoundEncoder(Graph& graph, const EncoderSpec& spec);

  // Runs the stack on a [1, 3, H, W] frame up to and including `deepest`.
  EncodedFrame run(Var frame, Tap deepest) const;
  Var encode(Var frame, Tap tap) const { return run(frame, tap).at(tap); }

 private:
  struct Layer {
    Var weight;
    Var bias;
    std::size_t stride;
  };
  std::vector<Layer> layers_;
};

Var encode(Graph& graph, Var frame, Tap tap, const EncoderSpec& spec);

// Graph-free evaluation; `frame` is [3, H, W] or [1, 3, H, W]. Returns NCHW features.
Tensor encode_frame(const Tensor& frame, Tap tap, const EncoderSpec& spec);

// Frame as a [1, 3, H, W] tensor.
Tensor as_batch(const Tensor& frame);

}  // namespace vst
