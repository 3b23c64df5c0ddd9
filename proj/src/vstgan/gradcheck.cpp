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

#include "vstgan/gradcheck.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <string>

namespace vst {

namespace {

struct Evaluation {
  double value = 0.0;
  std::uint64_t signature = 0;
};

Evaluation run(const Objective& objective, std::span<const Tensor> point, std::vector<Tensor>* gradients) {
  Graph graph;
  std::vector<Var> inputs;
  inputs.reserve(point.size());
  for (const Tensor& t : point) inputs.push_back(graph.input(t, gradients != nullptr));
  const Var out = objective(graph, inputs);
  const double value = out.value().item();
  if (!std::isfinite(value)) throw Error(ErrorKind::kNonFinite, "objective is not finite");
  if (gradients != nullptr) {
    graph.backward(out);
    gradients->clear();
    for (const Var& v : inputs) gradients->push_back(graph.gradient(v).value);
  }
  return Evaluation{value, graph.branch_signature()};
}

}  // namespace

double evaluate(const Objective& objective, std::span<const Tensor> point, std::vector<Tensor>* gradients) {
  return run(objective, point, gradients).value;
}

GradCheckResult grad_check(const Objective& objective, std::span<const Tensor> point, double step, bool skip_kinks) {
  if (!(step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "grad_check: step must be positive");
  std::vector<Tensor> analytic;
  const std::uint64_t base = run(objective, point, &analytic).signature;

  std::vector<Tensor> probe(point.begin(), point.end());
  GradCheckResult result;
  double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
  for (std::size_t t = 0; t < probe.size(); ++t) {
    for (std::size_t i = 0; i < probe[t].size(); ++i) {
      const double original = probe[t][i];
      Evaluation plus, minus;
      try {
        probe[t][i] = original + step;
        plus = run(objective, probe, nullptr);
        probe[t][i] = original - step;
        minus = run(objective, probe, nullptr);
      } catch (const Error& e) {
        throw Error(ErrorKind::kNonFinite, "grad_check: objective failed at perturbed coordinate " +
                                               std::to_string(i) + " of input " + std::to_string(t) + ": " +
                                               e.what());
      }
      probe[t][i] = original;
      if (skip_kinks && (plus.signature != base || minus.signature != base)) {
        ++result.excluded;
        continue;
      }
      const double numeric = (plus.value - minus.value) / (2.0 * step);
      const double a = analytic[t][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      diff_sq += (a - numeric) * (a - numeric);
      analytic_sq += a * a;
      numeric_sq += numeric * numeric;
      ++result.coordinates;
      if (rel > result.max_rel_error || result.coordinates == 1) {
        result.max_rel_error = rel;
        result.worst_input = t;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  const double scale = std::sqrt(std::max({analytic_sq, numeric_sq, 1e-16}));
  result.norm_rel_error = std::sqrt(diff_sq) / scale;
  return result;
}

}  // namespace vst
