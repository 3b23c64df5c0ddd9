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

#include <optional>
#include <span>
#include <vector>

#include "vstgan/encoders.hpp"
#include "vstgan/video.hpp"

namespace vst {

// Gaussian RBF kernel exp(-|u - v|^2 / (2 bw^2)). Without a fixed bandwidth the
// median heuristic is applied to every evaluation.
struct KernelSpec {
  std::optional<double> bandwidth;

  void validate() const;
};

struct LossWeights {
  int delta = 3;
  double alpha_micro = 0.005;
  double alpha_macro = 100.0;
  double omega = 0.00001;

  void validate() const;
  double alpha(Tap level) const { return level == Tap::kMicro ? alpha_micro : alpha_macro; }
};

// m-indexed samples stored as the rows of an [m, d] matrix.
struct SampleSet {
  Var samples;
  Tap level = Tap::kMicro;

  std::size_t count() const { return samples.dim(0); }
  std::size_t dimension() const { return samples.dim(1); }
  Var sample(std::size_t m) const;
};

// One sample per channel of an NCHW (N = 1) feature map, in channel order.
SampleSet sample_channels(Var feature_map, Tap level);

// (x - mean) / (std + eps) over all elements; population standard deviation.
Tensor standardize(const Tensor& x, double eps = 1e-8);
// Row-wise standardization as a differentiable op (zero std contributes no
// gradient through the scale).
Var standardize_rows(Var x, double eps = 1e-8);

// Evolvement samples z(|g(b)_m - g(a)_m|) at one level.
SampleSet evolvement(const EncodedFrame& a, const EncodedFrame& b, Tap level);
SampleSet evolvement(Graph& graph, Var frame_a, Var frame_b, Tap level, const EncoderSpec& spec);

// Median of the nonzero pairwise Euclidean distances over the pooled rows of
// a and b; 1.0 when every distance is zero.
double median_bandwidth(const Tensor& a, const Tensor& b);

// Biased (V-statistic) squared MMD between the row sets. Rounding noise
// below zero is clamped to 0.
double mmd2(const Tensor& a, const Tensor& b, const KernelSpec& kernel);
Var mmd2(const SampleSet& a, const SampleSet& b, const KernelSpec& kernel);

// Sum over pairs i < j with j - i < delta, each level weighted by its alpha.
// Pairs whose later frame index is below `frozen_prefix` are skipped (both
// frames held constant). Frames need the micro and macro taps.
Var evolve_sync_loss(Graph& graph, std::span<const EncodedFrame> x, std::span<const EncodedFrame> y,
                     const LossWeights& weights, const KernelSpec& kernel, std::size_t frozen_prefix = 0);

double evolve_sync_loss(const VideoSequence& x, const VideoSequence& y, const LossWeights& weights,
                        const EncoderSpec& spec, const KernelSpec& kernel);

// Evolve-sync loss with delta = order, divided by the number of frames.
double aesl(const VideoSequence& x, const VideoSequence& y, int order, const LossWeights& weights,
            const EncoderSpec& spec, const KernelSpec& kernel);
std::vector<double> aesl(const VideoSequence& x, const VideoSequence& y, std::span<const int> orders,
                         const LossWeights& weights, const EncoderSpec& spec, const KernelSpec& kernel);

inline constexpr int kAeslOrders[] = {2, 4, 6, 8, 10, 12};

}  // namespace vst
