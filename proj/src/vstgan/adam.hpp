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

#include <map>
#include <string>

#include "vstgan/tensor.hpp"

namespace vst {

// Named parameter tensors. std::map keeps names in lexicographic order, which
// is also the order used for serialization and update.
using ParamSet = std::map<std::string, Tensor>;

struct AdamSettings {
  double lr = 0.02;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamSettings settings) : settings_(settings) {}

  const AdamSettings& settings() const noexcept { return settings_; }
  long step() const noexcept { return step_; }
  const ParamSet& first_moments() const noexcept { return m_; }
  const ParamSet& second_moments() const noexcept { return v_; }

 private:
  friend void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

  AdamSettings settings_;
  long step_ = 0;
  ParamSet m_;
  ParamSet v_;
};

// One bias-corrected ADAM update of every parameter named in `grads`.
// Parameters without a gradient entry are left untouched.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

}  // namespace vst
