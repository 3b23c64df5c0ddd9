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

#include "vstgan/generator.hpp"

#include <cmath>

#include "vstgan/ops.hpp"

namespace vst {

GeneratorParams init_generator(std::uint64_t seed, bool recurrent) {
  Rng rng(seed);
  auto he = [&rng](Shape s, std::size_t fan_axis) {
    const double fan_in = static_cast<double>(s[fan_axis] * s[2] * s[3]);
    return Tensor::randn(std::move(s), rng, std::sqrt(2.0 / fan_in));
  };
  GeneratorParams g;
  g["g.dec.weight"] = he(Shape{48, 48, 3, 3}, 1);
  g["g.dec.bn.gamma"] = Tensor(Shape{48}, 1.0);
  g["g.dec.bn.beta"] = Tensor(Shape{48}, 0.0);
  g["g.up1.weight"] = he(Shape{48, 32, 3, 3}, 0);
  g["g.up1.bn.gamma"] = Tensor(Shape{32}, 1.0);
  g["g.up1.bn.beta"] = Tensor(Shape{32}, 0.0);
  g["g.up2.weight"] = he(Shape{32, 16, 3, 3}, 0);
  g["g.up2.bn.gamma"] = Tensor(Shape{16}, 1.0);
  g["g.up2.bn.beta"] = Tensor(Shape{16}, 0.0);
  g["g.out.weight"] = he(Shape{3, 16, 3, 3}, 1);
  g["g.out.bias"] = Tensor(Shape{3}, 0.0);
  g["g.rec.wx"] = he(Shape{3, 3, 3, 3}, 1);
  g["g.rec.bias"] = Tensor(Shape{3}, 0.0);
  Tensor wh = he(Shape{3, 3, 3, 3}, 1);
  if (!recurrent) wh.fill(0.0);
  g[kRecurrentWeight] = std::move(wh);
  return g;
}

namespace {

Var p(const BoundParams& g, const char* name) {
  auto it = g.find(name);
  if (it == g.end()) throw Error(ErrorKind::kInvalidArgument, std::string("missing generator parameter '") + name + "'");
  return it->second;
}

// Runs `fn`, attributing any non-finite activation to the named layer.
template <class F>
Var layer(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFinite) throw;
    throw Error(ErrorKind::kNonFinite, std::string("generator layer '") + name + "': " + e.what());
  }
}

}  // namespace

std::vector<Var> g_forward(const BoundEncoder& encoder, const BoundParams& g, std::span<const Var> frames,
                           std::optional<Var> previous) {
  std::vector<Var> out;
  if (frames.empty()) return out;
  Graph& graph = *frames.front().graph;
  const Shape& fs = frames.front().shape();
  const std::size_t h = fs.at(2), w = fs.at(3);
  const std::size_t h1 = conv_output_extent(h, 3, 2), w1 = conv_output_extent(w, 3, 2);
  Var prev = previous ? *previous : graph.constant(Tensor(Shape{1, 3, h, w}, 0.0));
  for (const Var& frame : frames) {
    if (frame.shape() != fs) {
      throw Error(ErrorKind::kShapeMismatch, "generator input frames differ in shape: " + to_string(frame.shape()) +
                                                 " vs " + to_string(fs));
    }
    const Var code = encoder.encode(frame, Tap::kGenEnc);
    Var x = layer("dec", [&] {
      return leaky_relu(batch_norm(conv2d(code, p(g, "g.dec.weight"), std::nullopt, 1), p(g, "g.dec.bn.gamma"),
                                   p(g, "g.dec.bn.beta")));
    });
    x = layer("up1", [&] {
      return leaky_relu(batch_norm(conv2d_transpose(x, p(g, "g.up1.weight"), std::nullopt, 2, h1, w1),
                                   p(g, "g.up1.bn.gamma"), p(g, "g.up1.bn.beta")));
    });
    x = layer("up2", [&] {
      return leaky_relu(batch_norm(conv2d_transpose(x, p(g, "g.up2.weight"), std::nullopt, 2, h, w),
                                   p(g, "g.up2.bn.gamma"), p(g, "g.up2.bn.beta")));
    });
    const Var decoded = layer("out", [&] { return conv2d(x, p(g, "g.out.weight"), p(g, "g.out.bias"), 1); });
    const Var y = layer("rec", [&] {
      const Var pre = add(conv2d(decoded, p(g, "g.rec.wx"), p(g, "g.rec.bias"), 1),
                          conv2d(prev, p(g, kRecurrentWeight), std::nullopt, 1));
      return sigmoid(pre);
    });
    out.push_back(y);
    prev = y;
  }
  return out;
}

namespace {

// Forward-only unroll of frames [begin, end), continuing from `previous`.
std::vector<Tensor> unroll(const VideoSequence& video, std::size_t begin, std::size_t end, const GeneratorParams& g,
                           const EncoderSpec& spec, std::optional<Tensor> previous) {
  std::vector<Tensor> out;
  for (std::size_t t = begin; t < end; ++t) {
    Graph graph;
    const BoundEncoder enc(graph, spec);
    const BoundParams gb = bind_params(graph, g, false);
    const Var x = graph.constant(as_batch(video.frames[t]));
    std::optional<Var> prev;
    if (previous) prev = graph.constant(*previous);
    const Var frame[] = {x};
    const Tensor y = g_forward(enc, gb, frame, prev).front().value();
    out.push_back(y);
    previous = y;
  }
  return out;
}

}  // namespace

VideoSequence g_forward(const VideoSequence& video, const GeneratorParams& g, const EncoderSpec& spec) {
  video.validate(true);
  VideoSequence out;
  out.id = video.id;
  out.fps = video.fps;
  for (const Tensor& y : unroll(video, 0, video.size(), g, spec, std::nullopt)) {
    out.frames.push_back(y.reshaped(Shape{3, video.height(), video.width()}));
  }
  return out;
}

VideoSequence stylize(const VideoSequence& video, const GeneratorParams& g, const EncoderSpec& spec) {
  VideoSequence out = g_forward(video, g, spec);
  for (Tensor& f : out.frames) f = clamp_unit(f);
  return out;
}

GanTerms gan_objective(const BoundEncoder& encoder, std::span<const EncodedFrame> source, std::span<const Var> synth,
                       std::span<const Tensor* const> paired_content, const BoundParams& d,
                       const LossWeights& weights, const KernelSpec& kernel) {
  if (source.size() != synth.size() || paired_content.size() != synth.size()) {
    throw Error(ErrorKind::kInvalidArgument, "gan objective: window sizes disagree");
  }
  if (synth.empty()) throw Error(ErrorKind::kInvalidArgument, "gan objective: empty window");
  Graph& graph = *synth.front().graph;
  GanTerms terms;
  std::vector<EncodedFrame> encoded;
  std::optional<Var> style, smooth, content;
  auto acc = [](std::optional<Var>& slot, Var v) { slot = slot ? add(*slot, v) : v; };
  for (std::size_t i = 0; i < synth.size(); ++i) {
    encoded.push_back(encoder.run(synth[i], paired_content[i] ? Tap::kContent : kStyleTap));
    acc(style, style_loss(d_score(encoded[i].at(kStyleTap), d), Label::kReal));
    acc(smooth, tv_prior(synth[i]));
    if (paired_content[i] != nullptr) {
      acc(content, content_loss(encoded[i].at(Tap::kContent), graph.constant(*paired_content[i])));
      ++terms.content_terms;
    }
  }
  terms.style = *style;
  terms.smoothness = scale(*smooth, weights.omega);
  terms.content = content ? *content : graph.constant(Tensor::scalar(0.0));
  terms.evolve_sync = synth.size() >= 2 ? evolve_sync_loss(graph, source, encoded, weights, kernel)
                                        : graph.constant(Tensor::scalar(0.0));
  terms.total = add(add(add(terms.style, terms.smoothness), terms.evolve_sync), terms.content);
  return terms;
}

void check_alignment(const RealSampleSet& real, std::size_t frame_count) {
  const std::vector<std::size_t> expected = paired_indices(frame_count);
  if (real.frames.size() != real.indices.size()) {
    throw Error(ErrorKind::kInvalidArgument, "real sample set has mismatched index and frame counts");
  }
  for (std::size_t k = 0; k < std::max(expected.size(), real.indices.size()); ++k) {
    if (k >= real.indices.size()) {
      throw Error(ErrorKind::kInvalidArgument, "real samples misaligned: missing sample for frame " +
                                                   std::to_string(expected[k]));
    }
    if (k >= expected.size() || real.indices[k] != expected[k]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "real samples misaligned: found sample for frame " + std::to_string(real.indices[k]) +
                      (k < expected.size() ? ", expected frame " + std::to_string(expected[k])
                                           : ", beyond the video's " + std::to_string(frame_count) + " frames"));
    }
  }
}

TrainResult train_gan(const VideoSequence& video, const RealSampleSet& real, const Tensor& style,
                      const TrainConfig& config, const EncoderSpec& spec, const GanObserver& observer) {
  video.validate(true);
  config.validate();
  check_alignment(real, video.size());
  for (const Tensor& f : real.frames) {
    if (f.shape() != video.frames.front().shape()) {
      throw Error(ErrorKind::kShapeMismatch, "real sample shape " + to_string(f.shape()) + " differs from video frames " +
                                                 to_string(video.frames.front().shape()));
    }
  }

  TrainResult result;
  result.params = init_generator(derive_seed(config.seed, 2), config.gan.recurrent);
  DiscriminatorParams d = init_discriminator(derive_seed(config.seed, 3), spec.channels(kStyleTap));
  AdamState g_opt(config.adam), d_opt(config.adam);
  Rng window_rng(derive_seed(config.seed, 4));

  const std::size_t T = video.size();
  std::vector<Tensor> frames, macro;
  for (const Tensor& f : video.frames) {
    frames.push_back(as_batch(f));
    macro.push_back(encode_frame(f, Tap::kMacro, spec));
  }
  std::vector<const Tensor*> real_content(T, nullptr);
  std::vector<Tensor> content_store, real_style;
  content_store.reserve(real.frames.size());
  for (std::size_t k = 0; k < real.indices.size(); ++k) {
    content_store.push_back(encode_frame(real.frames[k], Tap::kContent, spec));
    real_style.push_back(encode_frame(real.frames[k], kStyleTap, spec));
  }
  for (std::size_t k = 0; k < real.indices.size(); ++k) real_content[real.indices[k]] = &content_store[k];
  const Tensor style_features = encode_frame(style, kStyleTap, spec);

  const std::size_t batch = static_cast<std::size_t>(config.gan.batch);
  const std::size_t len = std::min(batch, T);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + len <= T; s += 2) starts.push_back(s);
  std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
  auto frozen = [&config](const std::string& name) { return !config.gan.recurrent && name == kRecurrentWeight; };

  for (int it = 0; it < config.gan.iterations; ++it) {
    const std::size_t start = starts[pick(window_rng)];
    GanLog log;
    log.iteration = it;
    log.window_start = start;
    std::vector<Tensor> fake;
    try {
      std::optional<Tensor> previous;
      if (start > 0) previous = unroll(video, 0, start, result.params, spec, std::nullopt).back();

      Graph g;
      const BoundEncoder enc(g, spec);
      const BoundParams gb = bind_params(g, result.params, true, frozen);
      const BoundParams db = bind_params(g, d, false);
      std::vector<Var> xs;
      std::vector<EncodedFrame> source;
      std::vector<const Tensor*> paired;
      for (std::size_t t = start; t < start + len; ++t) {
        EncodedFrame e;
        e.micro = g.constant(frames[t]);
        e.macro = g.constant(macro[t]);
        source.push_back(e);
        xs.push_back(e.micro);
        paired.push_back(real_content[t]);
      }
      std::optional<Var> prev;
      if (previous) prev = g.constant(*previous);
      const std::vector<Var> ys = g_forward(enc, gb, xs, prev);
      const GanTerms terms = gan_objective(enc, source, ys, paired, db, config.loss, config.kernel);
      log.total = terms.total.value().item();
      log.style = terms.style.value().item();
      log.content = terms.content.value().item();
      log.evolve_sync = terms.evolve_sync.value().item();
      log.smoothness = terms.smoothness.value().item();
      if (!(log.total <= 1e6)) {
        throw DivergenceError("generator objective diverged at iteration " + std::to_string(it) + " (" +
                                  std::to_string(log.total) + ")",
                              result.history);
      }
      g.backward(terms.total);
      adam_step(result.params, gradients_of(g, gb), g_opt);
      for (const Var& y : ys) fake.push_back(encode_frame(y.value(), kStyleTap, spec));
    } catch (const DivergenceError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNonFinite) throw;
      throw DivergenceError("generator training aborted at iteration " + std::to_string(it) + ": " + e.what(),
                            result.history);
    }

    std::vector<Tensor> real_batch{style_features};
    for (std::size_t t = start; t < start + len; ++t) {
      for (std::size_t k = 0; k < real.indices.size(); ++k) {
        if (real.indices[k] == t) real_batch.push_back(real_style[k]);
      }
    }
    for (int k = 0; k < config.gan.d_steps; ++k) log.d_objective = d_update(real_batch, fake, d, d_opt);
    result.history.push_back(log);
    if (observer) observer(log);
  }
  return result;
}

}  // namespace vst
