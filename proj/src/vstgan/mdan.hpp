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

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vstgan/config.hpp"
#include "vstgan/encoders.hpp"
#include "vstgan/evolvesync.hpp"
#include "vstgan/video.hpp"

namespace vst {

// Style-branch patch classifier on style-tap features:
// conv3x3x32 -> BN -> LReLU -> conv3x3x32 -> BN -> LReLU -> conv1x1x1.
using DiscriminatorParams = ParamSet;

DiscriminatorParams init_discriminator(std::uint64_t seed, std::size_t feature_channels = 32);

using BoundParams = std::map<std::string, Var>;
BoundParams bind_params(Graph& graph, const ParamSet& params, bool trainable,
                        const std::function<bool(const std::string&)>& frozen = {});
ParamSet gradients_of(const Graph& graph, const BoundParams& bound);

// One score per spatial location of the features ([1, 1, H, W]).
Var d_score(Var features, const BoundParams& d);

enum class Label { kReal, kFake };

// Hinge loss (1/N) sum_j max(0, 1 - l * s_j) with l = +1 (real) or -1 (fake).
Var style_loss(Var scores, Label label);
// Mean squared difference between two feature maps of identical shape.
Var content_loss(Var a, Var b);
// Sum of squared horizontal and vertical forward differences of an NCHW frame.
Var tv_prior(Var frame);

double style_loss(const Tensor& scores, Label label);
double content_loss(const Tensor& a, const Tensor& b);
double tv_prior(const Tensor& frame);

// Objective L_t(real batch, real) + sum L_t(fake batch, fake) at the current
// parameters.
double d_objective(std::span<const Tensor> real_features, std::span<const Tensor> fake_features,
                   const DiscriminatorParams& d);
// One ADAM step on that objective; returns its value before the step.
double d_update(std::span<const Tensor> real_features, std::span<const Tensor> fake_features,
                DiscriminatorParams& d, AdamState& state);

struct RealSampleTerms {
  Var total;
  Var style;
  Var content;
  Var evolve_sync;
  Var smoothness;  // omega-weighted
};

// Pixel objective for one window. `source` holds encoded X' frames (micro,
// macro and content taps) aligned with `synth`; the first `anchors` synth
// frames are fixed and only enter the evolve-sync term.
RealSampleTerms real_sample_objective(const BoundEncoder& encoder, std::span<const EncodedFrame> source,
                                      std::span<const Var> synth, std::size_t anchors, const BoundParams& d,
                                      const LossWeights& weights, const KernelSpec& kernel);

struct IterationLog {
  std::size_t segment = 0;
  int iteration = 0;
  double total = 0.0;
  double style = 0.0;
  double content = 0.0;
  double evolve_sync = 0.0;
  double smoothness = 0.0;
  double d_objective = 0.0;
};

struct SegmentStats {
  std::vector<std::size_t> indices;          // source frame indices optimized
  std::vector<std::size_t> anchor_indices;   // source frame indices held fixed
  IterationLog initial;
  IterationLog final;
};

struct RealSampleSet {
  std::vector<std::size_t> indices;  // 0, 2, 4, ...
  std::vector<Tensor> frames;        // [3, H, W], clamped to [0, 1]
  std::vector<SegmentStats> segments;

  const Tensor* find(std::size_t index) const;
};

// Positions of X' grouped into consecutive non-overlapping segments.
std::vector<std::vector<std::size_t>> segment_partition(std::size_t count, std::size_t segment);

// Even-index frames of a video (the downsampled source).
std::vector<std::size_t> paired_indices(std::size_t frame_count);

using IterationObserver = std::function<void(const IterationLog&)>;

RealSampleSet synthesize_real_samples(const VideoSequence& video, const Tensor& style, const TrainConfig& config,
                                      const EncoderSpec& encoder, const IterationObserver& observer = {});

}  // namespace vst
