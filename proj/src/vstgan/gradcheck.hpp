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
#include <span>
#include <vector>

#include "vstgan/graph.hpp"

namespace vst {

// Builds a scalar objective on `graph` from the leaves bound to the point.
using Objective = std::function<Var(Graph& graph, std::span<const Var> inputs)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_input = 0;   // which input tensor holds the worst coordinate
  std::size_t worst_index = 0;   // flat index inside that tensor
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
  std::size_t excluded = 0;      // coordinates whose probes crossed a kink
  double norm_rel_error = 0.0;   // |analytic - numeric|_2 / max(|analytic|_2, |numeric|_2) over checked coordinates
};

// Compares reverse-mode gradients against central differences with the given
// step. Relative error per coordinate is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// With `skip_kinks`, a coordinate is excluded when either probe lands on a
// different branch of a piecewise op than the unperturbed point.
GradCheckResult grad_check(const Objective& objective, std::span<const Tensor> point, double step = 1e-3,
                           bool skip_kinks = false);

// Value and gradient of `objective` at `point`, one gradient per input.
double evaluate(const Objective& objective, std::span<const Tensor> point, std::vector<Tensor>* gradients = nullptr);

}  // namespace vst
