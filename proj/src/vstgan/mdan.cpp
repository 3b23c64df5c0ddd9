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

#include "vstgan/mdan.hpp"

#include <cmath>
#include <memory>

#include "vstgan/ops.hpp"

namespace vst {

DiscriminatorParams init_discriminator(std::uint64_t seed, std::size_t feature_channels) {
  Rng rng(seed);
  const std::size_t width = 32;
  auto he = [&rng](Shape s) {
    const double fan_in = static_cast<double>(s[1] * s[2] * s[3]);
    return Tensor::randn(std::move(s), rng, std::sqrt(2.0 / fan_in));
  };
  DiscriminatorParams d;
  d["d.conv1.weight"] = he(Shape{width, feature_channels, 3, 3});
  d["d.bn1.gamma"] = Tensor(Shape{width}, 1.0);
  d["d.bn1.beta"] = Tensor(Shape{width}, 0.0);
  d["d.conv2.weight"] = he(Shape{width, width, 3, 3});
  d["d.bn2.gamma"] = Tensor(Shape{width}, 1.0);
  d["d.bn2.beta"] = Tensor(Shape{width}, 0.0);
  d["d.score.weight"] = he(Shape{1, width, 1, 1});
  d["d.score.bias"] = Tensor(Shape{1}, 0.0);
  return d;
}

BoundParams bind_params(Graph& graph, const ParamSet& params, bool trainable,
                        const std::function<bool(const std::string&)>& frozen) {
  BoundParams out;
  for (const auto& [name, t] : params) {
    const bool grad = trainable && !(frozen && frozen(name));
    out.emplace(name, graph.input(t, grad, name));
  }
  return out;
}

ParamSet gradients_of(const Graph& graph, const BoundParams& bound) {
  ParamSet grads;
  for (const auto& [name, v] : bound) {
    if (graph.requires_grad(v)) grads.emplace(name, graph.gradient(v).value);
  }
  return grads;
}

namespace {

Var param(const BoundParams& p, const char* name) {
  auto it = p.find(name);
  if (it == p.end()) throw Error(ErrorKind::kInvalidArgument, std::string("missing parameter '") + name + "'");
  return it->second;
}

}  // namespace

Var d_score(Var features, const BoundParams& d) {
  const Var w1 = param(d, "d.conv1.weight");
  const Shape& s = features.shape();
  if (s.size() != 4 || s[1] != w1.dim(1)) {
    throw Error(ErrorKind::kShapeMismatch, "discriminator expects style-tap features with " +
                                               std::to_string(w1.dim(1)) + " channels, got " + to_string(s));
  }
  Var h = conv2d(features, w1, std::nullopt, 1);
  h = leaky_relu(batch_norm(h, param(d, "d.bn1.gamma"), param(d, "d.bn1.beta")));
  h = conv2d(h, param(d, "d.conv2.weight"), std::nullopt, 1);
  h = leaky_relu(batch_norm(h, param(d, "d.bn2.gamma"), param(d, "d.bn2.beta")));
  return conv2d(h, param(d, "d.score.weight"), param(d, "d.score.bias"), 1);
}

Var style_loss(Var scores, Label label) {
  const double sign = label == Label::kReal ? 1.0 : -1.0;
  return mean(relu(add_scalar(scale(scores, -sign), 1.0)));
}

Var content_loss(Var a, Var b) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorKind::kShapeMismatch, "content loss: feature maps " + to_string(a.shape()) + " vs " +
                                               to_string(b.shape()));
  }
  return mean(square(sub(a, b)));
}

Var tv_prior(Var frame) {
  const Tensor& x = frame.value();
  if (x.rank() != 4) throw Error(ErrorKind::kShapeMismatch, "tv prior expects an NCHW frame, got " + to_string(x.shape()));
  const std::size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  double total = 0.0;
  for (std::size_t p = 0; p < planes; ++p) {
    const double* img = x.raw() + p * h * w;
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double v = img[i * w + j];
        if (j + 1 < w) total += (img[i * w + j + 1] - v) * (img[i * w + j + 1] - v);
        if (i + 1 < h) total += (img[(i + 1) * w + j] - v) * (img[(i + 1) * w + j] - v);
      }
    }
  }
  return frame.graph->record("tv-prior", Tensor::scalar(total), {frame}, [frame, planes, h, w](const Graph::BackwardContext& ctx) {
    Tensor* gx = ctx.inputs[0];
    if (gx == nullptr) return;
    const double g = 2.0 * ctx.grad[0];
    const Tensor& x = frame.value();
    for (std::size_t p = 0; p < planes; ++p) {
      const double* img = x.raw() + p * h * w;
      double* out = gx->raw() + p * h * w;
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          const double v = img[i * w + j];
          if (j + 1 < w) {
            const double d = g * (img[i * w + j + 1] - v);
            out[i * w + j + 1] += d;
            out[i * w + j] -= d;
          }
          if (i + 1 < h) {
            const double d = g * (img[(i + 1) * w + j] - v);
            out[(i + 1) * w + j] += d;
            out[i * w + j] -= d;
          }
        }
      }
    }
  });
}

double style_loss(const Tensor& scores, Label label) {
  Graph g;
  return style_loss(g.constant(scores), label).value().item();
}

double content_loss(const Tensor& a, const Tensor& b) {
  Graph g;
  return content_loss(g.constant(a), g.constant(b)).value().item();
}

double tv_prior(const Tensor& frame) {
  Graph g;
  return tv_prior(g.constant(as_batch(frame))).value().item();
}

namespace {

Var d_objective_on(Graph& g, std::span<const Tensor> real, std::span<const Tensor> fake, const BoundParams& d) {
  std::optional<Var> total;
  auto accumulate = [&](const Tensor& f, Label label) {
    const Var term = style_loss(d_score(g.constant(f), d), label);
    total = total ? add(*total, term) : term;
  };
  for (const Tensor& f : real) accumulate(f, Label::kReal);
  for (const Tensor& f : fake) accumulate(f, Label::kFake);
  if (!total) throw Error(ErrorKind::kInvalidArgument, "discriminator update needs at least one batch");
  return *total;
}

}  // namespace

double d_objective(std::span<const Tensor> real_features, std::span<const Tensor> fake_features,
                   const DiscriminatorParams& d) {
  Graph g;
  const BoundParams bound = bind_params(g, d, false);
  return d_objective_on(g, real_features, fake_features, bound).value().item();
}

double d_update(std::span<const Tensor> real_features, std::span<const Tensor> fake_features,
                DiscriminatorParams& d, AdamState& state) {
  Graph g;
  const BoundParams bound = bind_params(g, d, true);
  const Var obj = d_objective_on(g, real_features, fake_features, bound);
  g.backward(obj);
  adam_step(d, gradients_of(g, bound), state);
  return obj.value().item();
}

RealSampleTerms real_sample_objective(const BoundEncoder& encoder, std::span<const EncodedFrame> source,
                                      std::span<const Var> synth, std::size_t anchors, const BoundParams& d,
                                      const LossWeights& weights, const KernelSpec& kernel) {
  if (source.size() != synth.size()) {
    throw Error(ErrorKind::kInvalidArgument, "real-sample objective: " + std::to_string(source.size()) +
                                                 " source frames vs " + std::to_string(synth.size()) + " samples");
  }
  if (anchors >= synth.size()) throw Error(ErrorKind::kInvalidArgument, "real-sample objective: no free frames");
  Graph& g = *synth.front().graph;
  std::vector<EncodedFrame> encoded;
  encoded.reserve(synth.size());
  for (std::size_t i = 0; i < synth.size(); ++i) {
    encoded.push_back(encoder.run(synth[i], i < anchors ? Tap::kMacro : Tap::kContent));
  }

  std::optional<Var> style, content, smooth;
  auto acc = [](std::optional<Var>& slot, Var v) { slot = slot ? add(*slot, v) : v; };
  for (std::size_t i = anchors; i < synth.size(); ++i) {
    acc(style, style_loss(d_score(encoded[i].at(kStyleTap), d), Label::kReal));
    acc(content, content_loss(source[i].at(Tap::kContent), encoded[i].at(Tap::kContent)));
    acc(smooth, tv_prior(synth[i]));
  }
  const Var smoothness = scale(*smooth, weights.omega);
  const Var es = synth.size() >= 2 ? evolve_sync_loss(g, source, encoded, weights, kernel, anchors)
                                   : g.constant(Tensor::scalar(0.0));
  const Var total = add(add(add(*style, *content), smoothness), es);
  return RealSampleTerms{total, *style, *content, es, smoothness};
}

const Tensor* RealSampleSet::find(std::size_t index) const {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] == index) return &frames[k];
  }
  return nullptr;
}

std::vector<std::vector<std::size_t>> segment_partition(std::size_t count, std::size_t segment) {
  if (segment == 0) throw Error(ErrorKind::kInvalidArgument, "segment size must be >= 1");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < count; start += segment) {
    std::vector<std::size_t> seg;
    for (std::size_t p = start; p < std::min(count, start + segment); ++p) seg.push_back(p);
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<std::size_t> paired_indices(std::size_t frame_count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < frame_count; i += 2) out.push_back(i);
  return out;
}

namespace {

IterationLog to_log(const RealSampleTerms& t, std::size_t segment, int iteration) {
  IterationLog log;
  log.segment = segment;
  log.iteration = iteration;
  log.total = t.total.value().item();
  log.style = t.style.value().item();
  log.content = t.content.value().item();
  log.evolve_sync = t.evolve_sync.value().item();
  log.smoothness = t.smoothness.value().item();
  return log;
}

void check_style(const Tensor& style) {
  VideoSequence v;
  v.id = "style";
  v.frames.push_back(style);
  v.validate(true);
}

}  // namespace

RealSampleSet synthesize_real_samples(const VideoSequence& video, const Tensor& style, const TrainConfig& config,
                                      const EncoderSpec& spec, const IterationObserver& observer) {
  if (video.frames.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot synthesize real samples for an empty video");
  video.validate(true);
  check_style(style);
  config.validate();

  RealSampleSet result;
  result.indices = paired_indices(video.size());
  const std::size_t count = result.indices.size();

  // Frozen encodings of X' and of the style image.
  std::vector<Tensor> src_frames, src_macro, src_content, synth;
  for (std::size_t idx : result.indices) {
    const Tensor x = as_batch(video.frames[idx]);
    src_frames.push_back(x);
    src_macro.push_back(encode_frame(x, Tap::kMacro, spec));
    src_content.push_back(encode_frame(x, Tap::kContent, spec));
    synth.push_back(x);
  }
  const std::vector<Tensor> style_features{encode_frame(style, kStyleTap, spec)};

  DiscriminatorParams d = init_discriminator(derive_seed(config.seed, 1), spec.channels(kStyleTap));
  AdamState d_opt(config.adam);

  const auto anchors_wanted = static_cast<std::size_t>(config.mdan.anchors);
  const auto partition = segment_partition(count, static_cast<std::size_t>(config.mdan.segment));
  for (std::size_t s = 0; s < partition.size(); ++s) {
    const std::vector<std::size_t>& seg = partition[s];
    const std::size_t start = seg.front();
    const std::size_t anchor_begin = start >= anchors_wanted ? start - anchors_wanted : 0;
    std::vector<std::size_t> window;
    for (std::size_t p = anchor_begin; p <= seg.back(); ++p) window.push_back(p);
    const std::size_t anchors = start - anchor_begin;

    SegmentStats stats;
    for (std::size_t p : seg) stats.indices.push_back(result.indices[p]);
    for (std::size_t p = anchor_begin; p < start; ++p) stats.anchor_indices.push_back(result.indices[p]);

    ParamSet pixels;
    auto key = [](std::size_t p) { return "y." + std::to_string(100000 + p); };
    for (std::size_t p : seg) pixels[key(p)] = synth[p];
    AdamState pixel_opt(config.adam);

    // Evaluates the window objective; with `step` also applies one pixel update.
    auto run = [&](int iteration, bool step) {
      Graph g;
      const BoundEncoder enc(g, spec);
      const BoundParams dv = bind_params(g, d, false);
      std::vector<EncodedFrame> source;
      std::vector<Var> ys;
      BoundParams free_vars;
      for (std::size_t p : window) {
        EncodedFrame e;
        e.micro = g.constant(src_frames[p]);
        e.macro = g.constant(src_macro[p]);
        e.content = g.constant(src_content[p]);
        source.push_back(e);
        if (p < start) {
          ys.push_back(g.constant(synth[p]));
        } else {
          const Var v = g.input(pixels.at(key(p)), true, key(p));
          free_vars.emplace(key(p), v);
          ys.push_back(v);
        }
      }
      const RealSampleTerms terms = real_sample_objective(enc, source, ys, anchors, dv, config.loss, config.kernel);
      IterationLog log = to_log(terms, s, iteration);
      if (step) {
        g.backward(terms.total);
        adam_step(pixels, gradients_of(g, free_vars), pixel_opt);
      }
      return log;
    };

    auto with_context = [&](int iteration, auto&& fn) {
      try {
        return fn();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNonFinite) throw;
        throw Error(ErrorKind::kNonFinite, "real-sample synthesis aborted at segment " + std::to_string(s) +
                                               ", iteration " + std::to_string(iteration) + ": " + e.what());
      }
    };

    for (int it = 0; it < config.mdan.iterations; ++it) {
      IterationLog log = with_context(it, [&] { return run(it, true); });
      std::vector<Tensor> fake;
      for (std::size_t p : seg) fake.push_back(encode_frame(pixels.at(key(p)), kStyleTap, spec));
      for (int k = 0; k < config.mdan.d_steps; ++k) {
        log.d_objective = with_context(it, [&] { return d_update(style_features, fake, d, d_opt); });
      }
      if (it == 0) stats.initial = log;
      if (observer) observer(log);
    }
    stats.final = with_context(config.mdan.iterations, [&] { return run(config.mdan.iterations, false); });
    if (config.mdan.iterations == 0) stats.initial = stats.final;
    for (std::size_t p : seg) synth[p] = pixels.at(key(p));
    result.segments.push_back(std::move(stats));
  }

  const std::size_t h = video.height(), w = video.width();
  for (const Tensor& y : synth) result.frames.push_back(clamp_unit(y.reshaped(Shape{3, h, w})));
  return result;
}

}  // namespace vst
