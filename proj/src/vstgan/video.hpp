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

#include <string>
#include <vector>

#include "vstgan/tensor.hpp"

namespace vst {

// Ordered frames, each a [3, H, W] tensor with values in [0, 1].
struct VideoSequence {
  std::string id;
  double fps = 0.0;
  std::vector<Tensor> frames;

  std::size_t size() const noexcept { return frames.size(); }
  std::size_t height() const { return frames.at(0).dim(1); }
  std::size_t width() const { return frames.at(0).dim(2); }

  // Rejects empty sequences, mixed dimensions, and (optionally) values outside [0, 1].
  void validate(bool require_unit_range = true) const;
};

Tensor clamp_unit(const Tensor& frame);

}  // namespace vst
