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

#include "vstgan/evolvesync.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <tuple>

#include "vstgan/ops.hpp"

namespace vst {

void KernelSpec::validate() const {
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) {
    throw Error(ErrorKind::kInvalidArgument, "kernel bandwidth must be positive");
  }
}

void LossWeights::validate() const {
  if (delta < 2) throw Error(ErrorKind::kInvalidArgument, "delta must be >= 2, got " + std::to_string(delta));
  if (alpha_micro < 0.0 || alpha_macro < 0.0 || omega < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "loss weights must be >= 0");
  }
}

void VideoSequence::validate(bool require_unit_range) const {
  if (frames.empty()) throw Error(ErrorKind::kInvalidArgument, "video '" + id + "' has no frames");
  const Shape& first = frames.front().shape();
  if (first.size() != 3 || first[0] != 3) {
    throw Error(ErrorKind::kShapeMismatch, "frames must be [3xHxW], got " + to_string(first));
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].shape() != first) {
      throw Error(ErrorKind::kShapeMismatch, "frame " + std::to_string(t) + " has shape " +
                                                 to_string(frames[t].shape()) + ", expected " + to_string(first));
    }
    if (!frames[t].all_finite()) throw Error(ErrorKind::kNonFinite, "frame " + std::to_string(t) + " is not finite");
    if (require_unit_range) {
      for (double v : frames[t].data()) {
        if (v < 0.0 || v > 1.0) {
          throw Error(ErrorKind::kInvalidArgument, "frame " + std::to_string(t) + " has values outside [0, 1]");
        }
      }
    }
  }
}

Tensor clamp_unit(const Tensor& frame) {
  Tensor out = frame;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Var SampleSet::sample(std::size_t m) const { return slice(samples, 0, m, 1); }

SampleSet sample_channels(Var feature_map, Tap level) {
  const Shape& s = feature_map.shape();
  if (s.size() != 4 || s[0] != 1) {
    throw Error(ErrorKind::kShapeMismatch, "sample_channels expects a [1xCxHxW] map, got " + to_string(s));
  }
  return SampleSet{reshape(feature_map, Shape{s[1], s[2] * s[3]}), level};
}

namespace {

struct RowStats {
  double mean;
  double sigma;
};

RowStats row_stats(const double* x, std::size_t n) {
  double mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu += x[i];
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (x[i] - mu) * (x[i] - mu);
  return {mu, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

Tensor standardize(const Tensor& x, double eps) {
  const RowStats st = row_stats(x.raw(), x.size());
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - st.mean) / (st.sigma + eps);
  return y;
}

Var standardize_rows(Var x, double eps) {
  const Tensor& xv = x.value();
  if (xv.rank() != 2) throw Error(ErrorKind::kShapeMismatch, "standardize_rows expects a matrix, got " + to_string(xv.shape()));
  const std::size_t rows = xv.dim(0), n = xv.dim(1);
  auto stats = std::make_shared<std::vector<RowStats>>(rows);
  Tensor y(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = xv.raw() + r * n;
    const RowStats st = row_stats(src, n);
    (*stats)[r] = st;
    x.graph->note_branch(st.sigma > 0.0 ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) y[r * n + i] = (src[i] - st.mean) / (st.sigma + eps);
  }
  return x.graph->record("standardize", std::move(y), {x}, [x, stats, rows, n, eps](const Graph::BackwardContext& ctx) {
    Tensor* gx = ctx.inputs[0];
    if (gx == nullptr) return;
    const Tensor& xv = x.value();
    for (std::size_t r = 0; r < rows; ++r) {
      const RowStats st = (*stats)[r];
      const double s = st.sigma + eps;
      const double* g = ctx.grad.raw() + r * n;
      const double* src = xv.raw() + r * n;
      double g_mean = 0.0, g_dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g_mean += g[i];
        g_dot += g[i] * (src[i] - st.mean);
      }
      g_mean /= static_cast<double>(n);
      const double sigma_coeff = st.sigma > 0.0 ? g_dot / (s * s * static_cast<double>(n) * st.sigma) : 0.0;
      double* dst = gx->raw() + r * n;
      for (std::size_t i = 0; i < n; ++i) {
        dst[i] += (g[i] - g_mean) / s - sigma_coeff * (src[i] - st.mean);
      }
    }
  });
}

SampleSet evolvement(const EncodedFrame& a, const EncodedFrame& b, Tap level) {
  if (level != Tap::kMicro && level != Tap::kMacro) {
    throw Error(ErrorKind::kInvalidArgument, "evolvements are defined at the micro and macro levels only");
  }
  const Var fa = a.at(level);
  const Var fb = b.at(level);
  if (fa.shape() != fb.shape()) {
    throw Error(ErrorKind::kShapeMismatch, "evolvement: frame features " + to_string(fa.shape()) + " vs " +
                                               to_string(fb.shape()));
  }
  const SampleSet diff = sample_channels(abs(sub(fb, fa)), level);
  return SampleSet{standardize_rows(diff.samples), level};
}

SampleSet evolvement(Graph& graph, Var frame_a, Var frame_b, Tap level, const EncoderSpec& spec) {
  if (frame_a.shape() != frame_b.shape()) {
    throw Error(ErrorKind::kShapeMismatch, "evolvement: frames " + to_string(frame_a.shape()) + " vs " +
                                               to_string(frame_b.shape()));
  }
  const BoundEncoder enc(graph, spec);
  return evolvement(enc.run(frame_a, level), enc.run(frame_b, level), level);
}

namespace {

// Pooled-row MMD evaluation kept alive for the backward pass.
struct MmdEval {
  std::size_t m = 0, n = 0, d = 0;
  double bandwidth = 1.0;
  bool median = false;
  std::vector<std::tuple<std::size_t, std::size_t, double>> selected;  // (p, q, weight) of the median
  std::vector<double> sq;      // pooled squared distances, P x P
  std::vector<double> kernel;  // pooled kernel values, P x P
  double value = 0.0;
  bool clamped = false;  // raw estimate fell below zero

  std::size_t pooled() const { return m + n; }
};

const double* pooled_row(const double* a, const double* b, std::size_t m, std::size_t d, std::size_t p) {
  return p < m ? a + p * d : b + (p - m) * d;
}

std::vector<double> pooled_sq_distances(const double* a, std::size_t m, const double* b, std::size_t n,
                                        std::size_t d) {
  const std::size_t P = m + n;
  std::vector<double> sq(P * P, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    const double* u = pooled_row(a, b, m, d, p);
    for (std::size_t q = p + 1; q < P; ++q) {
      const double* v = pooled_row(a, b, m, d, q);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = u[i] - v[i];
        s += diff * diff;
      }
      sq[p * P + q] = s;
      sq[q * P + p] = s;
    }
  }
  return sq;
}

// Median of the nonzero distances, with the contributing pairs.
double median_from_sq(const std::vector<double>& sq, std::size_t P,
                      std::vector<std::tuple<std::size_t, std::size_t, double>>* selected) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> dists;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = p + 1; q < P; ++q) {
      if (sq[p * P + q] > 0.0) dists.emplace_back(std::sqrt(sq[p * P + q]), p, q);
    }
  }
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  const std::size_t count = dists.size();
  const auto& hi = dists[count / 2];
  if (count % 2 == 1) {
    if (selected) selected->emplace_back(std::get<1>(hi), std::get<2>(hi), 1.0);
    return std::get<0>(hi);
  }
  const auto& lo = dists[count / 2 - 1];
  if (selected) {
    selected->emplace_back(std::get<1>(lo), std::get<2>(lo), 0.5);
    selected->emplace_back(std::get<1>(hi), std::get<2>(hi), 0.5);
  }
  return 0.5 * (std::get<0>(lo) + std::get<0>(hi));
}

void check_sets(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw Error(ErrorKind::kShapeMismatch, "mmd2 expects sample matrices, got " + to_string(a.shape()) + " and " +
                                               to_string(b.shape()));
  }
  if (a.dim(1) != b.dim(1)) {
    throw Error(ErrorKind::kShapeMismatch, "mmd2: sample dimension " + std::to_string(a.dim(1)) + " vs " +
                                               std::to_string(b.dim(1)));
  }
}

MmdEval evaluate_mmd(const Tensor& a, const Tensor& b, const KernelSpec& kernel) {
  check_sets(a, b);
  kernel.validate();
  MmdEval e;
  e.m = a.dim(0);
  e.n = b.dim(0);
  e.d = a.dim(1);
  const std::size_t P = e.pooled();
  e.sq = pooled_sq_distances(a.raw(), e.m, b.raw(), e.n, e.d);
  if (kernel.bandwidth) {
    e.bandwidth = *kernel.bandwidth;
  } else {
    e.median = true;
    e.bandwidth = median_from_sq(e.sq, P, &e.selected);
    if (e.selected.empty()) e.median = false;  // degenerate pool: constant fallback
  }
  const double inv = 1.0 / (2.0 * e.bandwidth * e.bandwidth);
  e.kernel.resize(P * P);
  for (std::size_t i = 0; i < P * P; ++i) e.kernel[i] = std::exp(-e.sq[i] * inv);

  // Block sums in sorted order: equal multisets give equal sums, so
  // mmd2(a, a) is exactly 0 and mmd2(a, b) == mmd2(b, a) bit for bit.
  auto block_sum = [&e, P](std::size_t row0, std::size_t rows, std::size_t col0, std::size_t cols) {
    std::vector<double> v;
    v.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) v.push_back(e.kernel[(row0 + i) * P + col0 + j]);
    }
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double k : v) s += k;
    return s;
  };
  const double saa = block_sum(0, e.m, 0, e.m);
  const double sbb = block_sum(e.m, e.n, e.m, e.n);
  const double sab = block_sum(0, e.m, e.m, e.n);
  const double fm = static_cast<double>(e.m), fn = static_cast<double>(e.n);
  const double raw = saa / (fm * fm) + sbb / (fn * fn) - 2.0 * sab / (fm * fn);
  e.clamped = raw < 0.0;
  e.value = std::max(0.0, raw);
  return e;
}

void backward_mmd(const MmdEval& e, const Tensor& a, const Tensor& b, double upstream, Tensor* ga, Tensor* gb) {
  const std::size_t P = e.pooled();
  const double fm = static_cast<double>(e.m), fn = static_cast<double>(e.n);
  const double bw = e.bandwidth;
  const double inv = 1.0 / (2.0 * bw * bw);
  auto coeff = [&](std::size_t p, std::size_t q) {
    const bool pa = p < e.m, qa = q < e.m;
    if (pa && qa) return 1.0 / (fm * fm);
    if (!pa && !qa) return 1.0 / (fn * fn);
    return -1.0 / (fm * fn);
  };

  // d value / d sq for every unordered pair (both orders combined).
  std::vector<double> dsq(P * P, 0.0);
  double dbw = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = p + 1; q < P; ++q) {
      const double ck = 2.0 * coeff(p, q) * e.kernel[p * P + q];
      dsq[p * P + q] = -ck * inv;
      dbw += ck * e.sq[p * P + q] / (bw * bw * bw);
    }
  }
  if (e.median) {
    for (const auto& [p, q, w] : e.selected) {
      const double dist = std::sqrt(e.sq[p * P + q]);
      dsq[p * P + q] += w * dbw / (2.0 * dist);
    }
  }

  for (std::size_t p = 0; p < P; ++p) {
    const double* u = pooled_row(a.raw(), b.raw(), e.m, e.d, p);
    Tensor* gu_t = p < e.m ? ga : gb;
    double* gu = gu_t ? gu_t->raw() + (p < e.m ? p : p - e.m) * e.d : nullptr;
    for (std::size_t q = p + 1; q < P; ++q) {
      const double c = 2.0 * upstream * dsq[p * P + q];
      if (c == 0.0) continue;
      const double* v = pooled_row(a.raw(), b.raw(), e.m, e.d, q);
      Tensor* gv_t = q < e.m ? ga : gb;
      double* gv = gv_t ? gv_t->raw() + (q < e.m ? q : q - e.m) * e.d : nullptr;
      for (std::size_t i = 0; i < e.d; ++i) {
        const double diff = c * (u[i] - v[i]);
        if (gu) gu[i] += diff;
        if (gv) gv[i] -= diff;
      }
    }
  }
}

}  // namespace

double median_bandwidth(const Tensor& a, const Tensor& b) {
  check_sets(a, b);
  const std::vector<double> sq = pooled_sq_distances(a.raw(), a.dim(0), b.raw(), b.dim(0), a.dim(1));
  return median_from_sq(sq, a.dim(0) + b.dim(0), nullptr);
}

double mmd2(const Tensor& a, const Tensor& b, const KernelSpec& kernel) { return evaluate_mmd(a, b, kernel).value; }

Var mmd2(const SampleSet& a, const SampleSet& b, const KernelSpec& kernel) {
  if (a.samples.graph != b.samples.graph) throw Error(ErrorKind::kInvalidArgument, "mmd2: sets from different graphs");
  auto e = std::make_shared<MmdEval>(evaluate_mmd(a.samples.value(), b.samples.value(), kernel));
  const Var av = a.samples, bv = b.samples;
  Graph& g = *a.samples.graph;
  g.note_branch(e->clamped ? 1 : 0);
  for (const auto& [p, q, w] : e->selected) g.note_branch(p * e->pooled() + q);
  return g.record("mmd2", Tensor::scalar(e->value), {av, bv}, [e, av, bv](const Graph::BackwardContext& ctx) {
    backward_mmd(*e, av.value(), bv.value(), ctx.grad[0], ctx.inputs[0], ctx.inputs[1]);
  });
}

Var evolve_sync_loss(Graph& graph, std::span<const EncodedFrame> x, std::span<const EncodedFrame> y,
                     const LossWeights& weights, const KernelSpec& kernel, std::size_t frozen_prefix) {
  weights.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kInvalidArgument, "evolve-sync loss: source has " + std::to_string(x.size()) +
                                                 " frames, synthesized has " + std::to_string(y.size()));
  }
  if (y.size() < 2) throw Error(ErrorKind::kInvalidArgument, "evolve-sync loss needs at least 2 frames");
  std::optional<Var> total;
  const std::size_t T = y.size();
  const auto delta = static_cast<std::size_t>(weights.delta);
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = i + 1; j < T && j - i < delta; ++j) {
      if (j < frozen_prefix) continue;
      for (Tap level : {Tap::kMicro, Tap::kMacro}) {
        const double alpha = weights.alpha(level);
        if (alpha == 0.0) continue;
        const Var term = scale(mmd2(evolvement(x[i], x[j], level), evolvement(y[i], y[j], level), kernel), alpha);
        total = total ? add(*total, term) : term;
      }
    }
  }
  return total ? *total : graph.constant(Tensor::scalar(0.0));
}

namespace {

void check_pair(const VideoSequence& x, const VideoSequence& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kInvalidArgument, "video length mismatch: " + std::to_string(x.size()) + " vs " +
                                                 std::to_string(y.size()));
  }
  if (y.size() < 2) throw Error(ErrorKind::kInvalidArgument, "videos need at least 2 frames");
  x.validate(false);
  y.validate(false);
  if (x.frames.front().shape() != y.frames.front().shape()) {
    throw Error(ErrorKind::kShapeMismatch, "frame shapes differ: " + to_string(x.frames.front().shape()) + " vs " +
                                               to_string(y.frames.front().shape()));
  }
}

// alpha-weighted terms for pairs with gap < max_delta, in (i, j, level) order.
struct PairTerm {
  std::size_t gap;
  double value;
};

std::vector<PairTerm> pair_terms(const VideoSequence& x, const VideoSequence& y, std::size_t max_delta,
                                 const LossWeights& weights, const EncoderSpec& spec, const KernelSpec& kernel) {
  check_pair(x, y);
  Graph graph;
  const BoundEncoder enc(graph, spec);
  const Tap deepest = weights.alpha_macro > 0.0 ? Tap::kMacro : Tap::kMicro;
  std::vector<EncodedFrame> ex, ey;
  for (std::size_t t = 0; t < x.size(); ++t) {
    ex.push_back(enc.run(graph.constant(as_batch(x.frames[t])), deepest));
    ey.push_back(enc.run(graph.constant(as_batch(y.frames[t])), deepest));
  }
  std::vector<PairTerm> terms;
  const std::size_t T = x.size();
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = i + 1; j < T && j - i < max_delta; ++j) {
      for (Tap level : {Tap::kMicro, Tap::kMacro}) {
        const double alpha = weights.alpha(level);
        if (alpha == 0.0) continue;
        const double v = mmd2(evolvement(ex[i], ex[j], level).samples.value(),
                              evolvement(ey[i], ey[j], level).samples.value(), kernel);
        terms.push_back(PairTerm{j - i, alpha * v});
      }
    }
  }
  return terms;
}

}  // namespace

double evolve_sync_loss(const VideoSequence& x, const VideoSequence& y, const LossWeights& weights,
                        const EncoderSpec& spec, const KernelSpec& kernel) {
  weights.validate();
  double total = 0.0;
  for (const PairTerm& t : pair_terms(x, y, static_cast<std::size_t>(weights.delta), weights, spec, kernel)) {
    total += t.value;
  }
  return total;
}

std::vector<double> aesl(const VideoSequence& x, const VideoSequence& y, std::span<const int> orders,
                         const LossWeights& weights, const EncoderSpec& spec, const KernelSpec& kernel) {
  int max_order = 2;
  for (int k : orders) {
    if (k < 2) throw Error(ErrorKind::kInvalidArgument, "AESL order must be >= 2, got " + std::to_string(k));
    max_order = std::max(max_order, k);
  }
  LossWeights w = weights;
  w.delta = max_order;
  w.validate();
  const std::vector<PairTerm> terms = pair_terms(x, y, static_cast<std::size_t>(max_order), w, spec, kernel);
  std::vector<double> out;
  for (int k : orders) {
    double total = 0.0;
    for (const PairTerm& t : terms) {
      if (t.gap < static_cast<std::size_t>(k)) total += t.value;
    }
    out.push_back(total / static_cast<double>(y.size()));
  }
  return out;
}

double aesl(const VideoSequence& x, const VideoSequence& y, int order, const LossWeights& weights,
            const EncoderSpec& spec, const KernelSpec& kernel) {
  const int orders[] = {order};
  return aesl(x, y, orders, weights, spec, kernel).front();
}

}  // namespace vst
