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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vst {

struct CheckOutcome {
  std::string target;
  std::string name;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::size_t coordinates = 0;
  std::size_t excluded = 0;     // probes that crossed a kink
  double norm_rel_error = 0.0;  // informational
  std::string worst;  // location of the worst coordinate
  bool passed = false;
};

struct GradCheckReport {
  std::vector<CheckOutcome> checks;
  double seconds = 0.0;

  bool passed() const;
};

inline constexpr int kOpsSeeds = 10;
inline constexpr double kOpsStep = 1e-4;
inline constexpr double kOpsTolerance = 1e-5;
inline constexpr double kObjectiveStep = 1e-3;
inline constexpr double kObjectiveTolerance = 1e-4;

// target is "ops" (every differentiable op over kOpsSeeds seeds), "eq4" (the
// real-sample pixel objective) or "eq7" (the generator objective w.r.t. its
// parameters), both on 2-frame 8x8 inputs.
GradCheckReport run_gradcheck(std::string_view target, std::uint64_t seed);

}  // namespace vst
