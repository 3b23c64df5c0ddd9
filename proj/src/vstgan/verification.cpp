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

#include "vstgan/verification.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "vstgan/config.hpp"
#include "vstgan/evolvesync.hpp"
#include "vstgan/fixtures.hpp"
#include "vstgan/generator.hpp"
#include "vstgan/gradcheck.hpp"
#include "vstgan/mdan.hpp"
#include "vstgan/ops.hpp"

namespace vst {

bool GradCheckReport::passed() const {
  if (checks.empty()) return false;
  for (const CheckOutcome& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

struct Case {
  std::vector<Tensor> point;
  Objective objective;
  std::vector<std::string> input_names;
};

using CaseFactory = std::function<Case(Rng&)>;

// Values in [-1, 1] kept at least `margin` away from zero.
Tensor away_from_zero(Shape shape, Rng& rng, double margin = 0.05) {
  Tensor t = Tensor::uniform(std::move(shape), rng, -1.0, 1.0);
  for (double& v : t.data()) {
    if (std::abs(v) < margin) v += v < 0.0 ? -2.0 * margin : 2.0 * margin;
  }
  return t;
}

// sum(out * r) for a fixed random r, so every output element matters.
Var project(Var out, Rng& rng) {
  Graph& g = *out.graph;
  return sum(mul(out, g.constant(Tensor::randn(out.shape(), rng))));
}

Case unary(Shape shape, Rng& rng, std::function<Var(Var)> op, Tensor x) {
  const Tensor r = Tensor::randn(shape, rng);
  return Case{{std::move(x)},
              [op, r](Graph& g, std::span<const Var> in) { return sum(mul(op(in[0]), g.constant(r))); },
              {"x"}};
}

Case binary(Shape shape, Rng& rng, std::function<Var(Var, Var)> op) {
  Tensor a = Tensor::randn(shape, rng), b = Tensor::randn(shape, rng);
  const Tensor r = Tensor::randn(shape, rng);
  return Case{{std::move(a), std::move(b)},
              [op, r](Graph& g, std::span<const Var> in) { return sum(mul(op(in[0], in[1]), g.constant(r))); },
              {"a", "b"}};
}

std::vector<std::pair<std::string, CaseFactory>> op_cases() {
  const Shape s{3, 4};
  std::vector<std::pair<std::string, CaseFactory>> cases;
  cases.emplace_back("add", [s](Rng& rng) { return binary(s, rng, [](Var a, Var b) { return add(a, b); }); });
  cases.emplace_back("sub", [s](Rng& rng) { return binary(s, rng, [](Var a, Var b) { return sub(a, b); }); });
  cases.emplace_back("mul", [s](Rng& rng) { return binary(s, rng, [](Var a, Var b) { return mul(a, b); }); });
  cases.emplace_back("scale", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return scale(x, -1.7); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("add_scalar", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return add_scalar(x, 0.3); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("abs", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return abs(x); }, away_from_zero(s, rng));
  });
  cases.emplace_back("square", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return square(x); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("sqrt", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return sqrt(x); }, Tensor::uniform(s, rng, 0.5, 2.0));
  });
  cases.emplace_back("exp", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return exp(x); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("tanh", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return tanh(x); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("sigmoid", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return sigmoid(x); }, Tensor::randn(s, rng, 2.0));
  });
  cases.emplace_back("relu", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return relu(x); }, away_from_zero(s, rng));
  });
  cases.emplace_back("leaky_relu", [s](Rng& rng) {
    return unary(s, rng, [](Var x) { return leaky_relu(x); }, away_from_zero(s, rng));
  });
  cases.emplace_back("sum", [s](Rng& rng) {
    return unary(Shape{1}, rng, [](Var x) { return sum(square(x)); }, Tensor::randn(s, rng));
  });
  cases.emplace_back("mean", [s](Rng& rng) {
    return unary(Shape{1}, rng, [](Var x) { return mean(square(x)); }, Tensor::randn(s, rng));
  });
  auto conv_case = [](Shape xs, Shape ws, std::size_t stride, bool bias) {
    return [=](Rng& rng) {
      Case c;
      c.point = {Tensor::randn(xs, rng), Tensor::randn(ws, rng, 0.5)};
      c.input_names = {"x", "weight"};
      if (bias) {
        c.point.push_back(Tensor::randn(Shape{ws[0]}, rng));
        c.input_names.push_back("bias");
      }
      const std::uint64_t proj_seed = rng();
      c.objective = [=](Graph&, std::span<const Var> in) {
        Rng r(proj_seed);
        return project(conv2d(in[0], in[1], bias ? std::optional<Var>(in[2]) : std::nullopt, stride), r);
      };
      return c;
    };
  };
  cases.emplace_back("conv2d/s1", conv_case(Shape{2, 3, 5, 5}, Shape{4, 3, 3, 3}, 1, true));
  cases.emplace_back("conv2d/s2", conv_case(Shape{1, 2, 6, 7}, Shape{3, 2, 3, 3}, 2, true));
  cases.emplace_back("conv2d/1x1", conv_case(Shape{1, 3, 4, 4}, Shape{2, 3, 1, 1}, 1, false));
  cases.emplace_back("conv2d_transpose", [](Rng& rng) {
    Case c;
    c.point = {Tensor::randn(Shape{1, 3, 3, 4}, rng), Tensor::randn(Shape{3, 2, 3, 3}, rng, 0.5),
               Tensor::randn(Shape{2}, rng)};
    c.input_names = {"x", "weight", "bias"};
    const std::uint64_t proj_seed = rng();
    c.objective = [=](Graph&, std::span<const Var> in) {
      Rng r(proj_seed);
      return project(conv2d_transpose(in[0], in[1], in[2], 2, 6, 7), r);
    };
    return c;
  });
  cases.emplace_back("batch_norm", [](Rng& rng) {
    Case c;
    c.point = {Tensor::randn(Shape{2, 3, 3, 3}, rng), Tensor::uniform(Shape{3}, rng, 0.5, 1.5),
               Tensor::randn(Shape{3}, rng)};
    c.input_names = {"x", "gamma", "beta"};
    const std::uint64_t proj_seed = rng();
    c.objective = [=](Graph&, std::span<const Var> in) {
      Rng r(proj_seed);
      return project(batch_norm(in[0], in[1], in[2]), r);
    };
    return c;
  });
  cases.emplace_back("reshape/slice/concat", [](Rng& rng) {
    Case c;
    c.point = {Tensor::randn(Shape{1, 4, 2, 3}, rng), Tensor::randn(Shape{1, 2, 2, 3}, rng)};
    c.input_names = {"a", "b"};
    const std::uint64_t proj_seed = rng();
    c.objective = [=](Graph&, std::span<const Var> in) {
      Rng r(proj_seed);
      const Var joined = concat_channels({slice_channels(in[0], 1, 2), in[1], slice_channels(in[0], 0, 1)});
      return project(reshape(joined, Shape{5, 6}), r);
    };
    return c;
  });
  cases.emplace_back("standardize_rows", [](Rng& rng) {
    Case c;
    c.point = {Tensor::randn(Shape{4, 6}, rng)};
    c.input_names = {"x"};
    const std::uint64_t proj_seed = rng();
    c.objective = [=](Graph&, std::span<const Var> in) {
      Rng r(proj_seed);
      return project(standardize_rows(in[0]), r);
    };
    return c;
  });
  auto mmd_case = [](std::optional<double> bandwidth) {
    return [=](Rng& rng) {
      Case c;
      c.point = {Tensor::randn(Shape{5, 7}, rng), Tensor::randn(Shape{6, 7}, rng, 1.3)};
      c.input_names = {"a", "b"};
      c.objective = [=](Graph&, std::span<const Var> in) {
        return mmd2(SampleSet{in[0], Tap::kMicro}, SampleSet{in[1], Tap::kMicro}, KernelSpec{bandwidth});
      };
      return c;
    };
  };
  cases.emplace_back("mmd2/fixed", mmd_case(1.7));
  cases.emplace_back("mmd2/median", mmd_case(std::nullopt));
  cases.emplace_back("tv_prior", [](Rng& rng) {
    return unary(Shape{1}, rng, [](Var x) { return tv_prior(x); }, Tensor::randn(Shape{1, 3, 5, 5}, rng));
  });
  auto hinge_case = [](Label label) {
    return [=](Rng& rng) {
      // scores kept away from the hinge at l * s = 1
      Tensor scores = away_from_zero(Shape{1, 1, 4, 4}, rng);
      const double l = label == Label::kReal ? 1.0 : -1.0;
      for (double& v : scores.data()) v = l * (1.0 + 1.5 * v);
      return unary(Shape{1}, rng, [=](Var x) { return style_loss(x, label); }, std::move(scores));
    };
  };
  cases.emplace_back("style_loss/real", hinge_case(Label::kReal));
  cases.emplace_back("style_loss/fake", hinge_case(Label::kFake));
  cases.emplace_back("content_loss", [](Rng& rng) {
    Case c;
    c.point = {Tensor::randn(Shape{1, 2, 3, 3}, rng), Tensor::randn(Shape{1, 2, 3, 3}, rng)};
    c.input_names = {"a", "b"};
    c.objective = [](Graph&, std::span<const Var> in) { return content_loss(in[0], in[1]); };
    return c;
  });
  return cases;
}

std::string describe(const GradCheckResult& r, const std::vector<std::string>& names, const std::string& prefix) {
  std::ostringstream os;
  os << prefix << (r.worst_input < names.size() ? names[r.worst_input] : "input " + std::to_string(r.worst_input))
     << "[" << r.worst_index << "] analytic=" << r.analytic << " numeric=" << r.numeric;
  return os.str();
}

CheckOutcome outcome(const char* target, const char* name, const GradCheckResult& r,
                     const std::vector<std::string>& names) {
  CheckOutcome out;
  out.target = target;
  out.name = name;
  out.max_rel_error = r.max_rel_error;
  out.tolerance = kObjectiveTolerance;
  out.coordinates = r.coordinates;
  out.excluded = r.excluded;
  out.norm_rel_error = r.norm_rel_error;
  out.worst = describe(r, names, "");
  out.passed = r.coordinates > 0 && r.max_rel_error < kObjectiveTolerance;
  return out;
}

void run_ops(std::uint64_t seed, GradCheckReport& report) {
  for (auto& [name, factory] : op_cases()) {
    CheckOutcome out;
    out.target = "ops";
    out.name = name;
    out.tolerance = kOpsTolerance;
    for (int s = 0; s < kOpsSeeds; ++s) {
      Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(s)));
      const Case c = factory(rng);
      const GradCheckResult r = grad_check(c.objective, c.point, kOpsStep);
      out.coordinates += r.coordinates;
      out.excluded += r.excluded;
      out.norm_rel_error = std::max(out.norm_rel_error, r.norm_rel_error);
      if (s == 0 || r.max_rel_error > out.max_rel_error) {
        out.max_rel_error = r.max_rel_error;
        out.worst = describe(r, c.input_names, "seed " + std::to_string(s) + ": ");
      }
    }
    out.passed = out.max_rel_error < kOpsTolerance;
    report.checks.push_back(std::move(out));
  }
}

// Two consecutive 8x8 source frames and a perturbed synthesized pair.
struct SmallWindow {
  std::vector<Tensor> source;
  std::vector<Tensor> synth;
};

SmallWindow small_window(std::uint64_t seed) {
  const VideoSequence video = make_fixture(FixtureKind::kTranslatingTexture, seed, 4, 8);
  const VideoSequence noisy = add_noise(video, 0.1, derive_seed(seed, 7));
  SmallWindow w;
  for (std::size_t k = 0; k < 2; ++k) {
    w.source.push_back(as_batch(video.frames[k]));
    w.synth.push_back(as_batch(noisy.frames[k]));
  }
  return w;
}

void run_eq4(std::uint64_t seed, GradCheckReport& report) {
  const TrainConfig config;
  const EncoderSpec spec = build_encoder(config.encoder_seed);
  const DiscriminatorParams d = init_discriminator(derive_seed(seed, 1), spec.channels(kStyleTap));
  const SmallWindow w = small_window(seed);
  const Objective objective = [&](Graph& g, std::span<const Var> in) {
    const BoundEncoder enc(g, spec);
    const BoundParams dv = bind_params(g, d, false);
    std::vector<EncodedFrame> source;
    for (const Tensor& x : w.source) source.push_back(enc.run(g.constant(x), Tap::kContent));
    return real_sample_objective(enc, source, in, 0, dv, config.loss, config.kernel).total;
  };
  const GradCheckResult r = grad_check(objective, w.synth, kObjectiveStep, true);
  report.checks.push_back(outcome("eq4", "real-sample objective / pixels", r, {"frame0", "frame1"}));
}

void run_eq7(std::uint64_t seed, GradCheckReport& report) {
  const TrainConfig config;
  const EncoderSpec spec = build_encoder(config.encoder_seed);
  const DiscriminatorParams d = init_discriminator(derive_seed(seed, 3), spec.channels(kStyleTap));
  const GeneratorParams params = init_generator(derive_seed(seed, 2), true);
  const SmallWindow w = small_window(seed);
  const Tensor paired = encode_frame(w.synth[0], Tap::kContent, spec);
  std::vector<std::string> names;
  std::vector<Tensor> point;
  for (const auto& [name, t] : params) {
    names.push_back(name);
    point.push_back(t);
  }
  const Objective objective = [&](Graph& g, std::span<const Var> in) {
    const BoundEncoder enc(g, spec);
    const BoundParams dv = bind_params(g, d, false);
    BoundParams gv;
    for (std::size_t k = 0; k < names.size(); ++k) gv.emplace(names[k], in[k]);
    std::vector<Var> frames;
    std::vector<EncodedFrame> source;
    for (const Tensor& x : w.source) {
      frames.push_back(g.constant(x));
      source.push_back(enc.run(frames.back(), kStyleTap));
    }
    const std::vector<Var> synth = g_forward(enc, gv, frames);
    const std::vector<const Tensor*> content{&paired, nullptr};
    return gan_objective(enc, source, synth, content, dv, config.loss, config.kernel).total;
  };
  const GradCheckResult r = grad_check(objective, point, kObjectiveStep, true);
  report.checks.push_back(outcome("eq7", "generator objective / parameters", r, names));
}

}  // namespace

GradCheckReport run_gradcheck(std::string_view target, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GradCheckReport report;
  if (target == "ops") {
    run_ops(seed, report);
  } else if (target == "eq4") {
    run_eq4(seed, report);
  } else if (target == "eq7") {
    run_eq7(seed, report);
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown gradcheck target '" + std::string(target) +
                                                 "' (expected ops, eq4 or eq7)");
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace vst
