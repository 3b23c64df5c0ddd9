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

#include "vstgan/encoders.hpp"

#include <cmath>

#include "vstgan/ops.hpp"

namespace vst {
namespace {

struct LayerShape {
  std::size_t out;
  std::size_t stride;
};
constexpr LayerShape kStack[] = {{16, 1}, {32, 2}, {48, 2}, {64, 2}};

// Index of the last layer that must run to reach a tap; -1 for the raw frame.
int last_layer(Tap tap) {
  switch (tap) {
    case Tap::kMicro: return -1;
    case Tap::kMacro: return 1;
    case Tap::kGenEnc: return 2;
    case Tap::kContent: return 3;
  }
  return -1;
}

}  // namespace

Tap parse_tap(std::string_view name) {
  if (name == "micro") return Tap::kMicro;
  if (name == "macro" || name == "style") return Tap::kMacro;
  if (name == "gen-enc") return Tap::kGenEnc;
  if (name == "content") return Tap::kContent;
  throw Error(ErrorKind::kInvalidArgument, "unknown encoder tap '" + std::string(name) + "'");
}

std::string_view tap_name(Tap tap) {
  switch (tap) {
    case Tap::kMicro: return "micro";
    case Tap::kMacro: return "macro";
    case Tap::kGenEnc: return "gen-enc";
    case Tap::kContent: return "content";
  }
  return "?";
}

std::size_t EncoderSpec::channels(Tap tap) const {
  const int last = last_layer(tap);
  return last < 0 ? 3 : layers.at(static_cast<std::size_t>(last)).weight.dim(0);
}

EncoderSpec build_encoder(std::uint64_t seed) {
  EncoderSpec spec;
  spec.seed = seed;
  Rng rng(seed);
  std::size_t in = 3;
  for (const LayerShape& s : kStack) {
    const double fan_in = static_cast<double>(in * 9);
    ConvLayer layer;
    layer.weight = Tensor::randn(Shape{s.out, in, 3, 3}, rng, std::sqrt(2.0 / fan_in));
    layer.bias = Tensor(Shape{s.out}, 0.0);
    layer.stride = s.stride;
    spec.layers.push_back(std::move(layer));
    in = s.out;
  }
  return spec;
}

ParamSet encoder_tensors(const EncoderSpec& spec) {
  ParamSet out;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const std::string prefix = "enc." + std::to_string(i);
    out.emplace(prefix + ".bias", spec.layers[i].bias);
    out.emplace(prefix + ".weight", spec.layers[i].weight);
  }
  return out;
}

EncoderSpec encoder_from_tensors(std::uint64_t seed, const ParamSet& tensors) {
  EncoderSpec spec;
  spec.seed = seed;
  std::size_t in = 3;
  for (std::size_t i = 0; i < std::size(kStack); ++i) {
    const std::string prefix = "enc." + std::to_string(i);
    auto w = tensors.find(prefix + ".weight");
    auto b = tensors.find(prefix + ".bias");
    if (w == tensors.end() || b == tensors.end()) {
      throw Error(ErrorKind::kFormat, "encoder tensors missing '" + prefix + "'");
    }
    const Shape expected_w{kStack[i].out, in, 3, 3};
    if (w->second.shape() != expected_w || b->second.shape() != Shape{kStack[i].out}) {
      throw Error(ErrorKind::kFormat, "encoder layer '" + prefix + "' has shape " + to_string(w->second.shape()) +
                                          ", expected " + to_string(expected_w));
    }
    spec.layers.push_back(ConvLayer{w->second, b->second, kStack[i].stride});
    in = kStack[i].out;
  }
  return spec;
}

Var EncodedFrame::at(Tap tap) const {
  const std::optional<Var>* slot = nullptr;
  switch (tap) {
    case Tap::kMicro: return micro;
    case Tap::kMacro: slot = &macro; break;
    case Tap::kGenEnc: slot = &gen_enc; break;
    case Tap::kContent: slot = &content; break;
  }
  if (slot == nullptr || !slot->has_value()) {
    throw Error(ErrorKind::kInvalidArgument, "tap '" + std::string(tap_name(tap)) + "' was not computed");
  }
  return **slot;
}

BoundEncoder::BoundEncoder(Graph& graph, const EncoderSpec& spec) {
  for (const ConvLayer& l : spec.layers) {
    layers_.push_back(Layer{graph.constant(l.weight), graph.constant(l.bias), l.stride});
  }
}

EncodedFrame BoundEncoder::run(Var frame, Tap deepest) const {
  const Shape& s = frame.shape();
  if (s.size() != 4 || s[0] != 1 || s[1] != 3) {
    throw Error(ErrorKind::kShapeMismatch, "encoder expects a [1x3xHxW] frame, got " + to_string(s));
  }
  EncodedFrame out;
  out.micro = frame;
  const int last = last_layer(deepest);
  Var h = frame;
  for (int i = 0; i <= last; ++i) {
    const Layer& l = layers_.at(static_cast<std::size_t>(i));
    h = relu(conv2d(h, l.weight, l.bias, l.stride));
    if (i == 1) out.macro = h;
    if (i == 2) out.gen_enc = h;
    if (i == 3) out.content = h;
  }
  return out;
}

Var encode(Graph& graph, Var frame, Tap tap, const EncoderSpec& spec) {
  return BoundEncoder(graph, spec).encode(frame, tap);
}

Tensor as_batch(const Tensor& frame) {
  if (frame.rank() == 4) return frame;
  if (frame.rank() != 3) throw Error(ErrorKind::kShapeMismatch, "expected a [3xHxW] frame, got " + to_string(frame.shape()));
  return frame.reshaped(Shape{1, frame.dim(0), frame.dim(1), frame.dim(2)});
}

Tensor encode_frame(const Tensor& frame, Tap tap, const EncoderSpec& spec) {
  Graph graph;
  const Var x = graph.constant(as_batch(frame));
  return encode(graph, x, tap, spec).value();
}

}  // namespace vst
