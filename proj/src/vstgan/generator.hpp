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
#include <optional>
#include <span>
#include <vector>

#include "vstgan/config.hpp"
#include "vstgan/encoders.hpp"
#include "vstgan/mdan.hpp"
#include "vstgan/video.hpp"

namespace vst {

// Decoder conv3x3x48 -> BN -> LReLU -> up2x32 -> BN -> LReLU -> up2x16 -> BN ->
// LReLU -> conv3x3x3, then the recurrent output layer
// Y_t = sigmoid(W_x * decoded_t + W_h * Y_{t-1} + b).
using GeneratorParams = ParamSet;

inline constexpr const char* kRecurrentWeight = "g.rec.wh";

GeneratorParams init_generator(std::uint64_t seed, bool recurrent = true);

// Unrolls G over `frames` ([1, 3, H, W] each). `previous` is the output frame
// preceding frames[0]; zeros when absent.
std::vector<Var> g_forward(const BoundEncoder& encoder, const BoundParams& g, std::span<const Var> frames,
                           std::optional<Var> previous = std::nullopt);

VideoSequence g_forward(const VideoSequence& video, const GeneratorParams& g, const EncoderSpec& spec);

struct GanTerms {
  Var total;
  Var style;
  Var smoothness;  // omega-weighted
  Var evolve_sync;
  Var content;
  std::size_t content_terms = 0;
};

// Generator objective over a window of consecutive frames. `source` holds the
// encoded input frames (micro and macro taps). `paired_content` maps window
// positions to the content-tap features of the matching real sample; unpaired
// positions are nullptr.
GanTerms gan_objective(const BoundEncoder& encoder, std::span<const EncodedFrame> source, std::span<const Var> synth,
                       std::span<const Tensor* const> paired_content, const BoundParams& d,
                       const LossWeights& weights, const KernelSpec& kernel);

// Checks that `real` holds exactly the even-index frames of a video of
// `frame_count` frames; throws naming the first offending index.
void check_alignment(const RealSampleSet& real, std::size_t frame_count);

struct GanLog {
  int iteration = 0;
  std::size_t window_start = 0;
  double total = 0.0;
  double style = 0.0;
  double content = 0.0;
  double evolve_sync = 0.0;
  double smoothness = 0.0;
  double d_objective = 0.0;
};

struct TrainResult {
  GeneratorParams params;
  std::vector<GanLog> history;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<GanLog> history)
      : Error(ErrorKind::kDiverged, what), history_(std::move(history)) {}
  const std::vector<GanLog>& history() const noexcept { return history_; }

 private:
  std::vector<GanLog> history_;
};

using GanObserver = std::function<void(const GanLog&)>;

TrainResult train_gan(const VideoSequence& video, const RealSampleSet& real, const Tensor& style,
                      const TrainConfig& config, const EncoderSpec& spec, const GanObserver& observer = {});

// g_forward followed by clamping to [0, 1].
VideoSequence stylize(const VideoSequence& video, const GeneratorParams& g, const EncoderSpec& spec);

}  // namespace vst
