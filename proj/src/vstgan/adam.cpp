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

#include "vstgan/adam.hpp"

#include <cmath>

namespace vst {

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state) {
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) throw Error(ErrorKind::kInvalidArgument, "adam: gradient for unknown parameter '" + name + "'");
    require_same_shape(it->second, g, ("adam: parameter '" + name + "'").c_str());
    auto m_it = state.m_.find(name);
    if (m_it != state.m_.end()) require_same_shape(m_it->second, g, ("adam: moments of '" + name + "'").c_str());
  }

  const AdamSettings& s = state.settings_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);

  for (const auto& [name, g] : grads) {
    Tensor& p = params.at(name);
    auto [m_it, m_new] = state.m_.try_emplace(name, g.shape(), 0.0);
    auto [v_it, v_new] = state.v_.try_emplace(name, g.shape(), 0.0);
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
      v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
    }
  }
}

}  // namespace vst
