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

#include <optional>
#include <vector>

#include "vstgan/graph.hpp"

namespace vst {

inline constexpr double kLeakySlope = 0.2;

// Elementwise arithmetic; operands must have identical shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);

Var abs(Var x);     // subgradient 0 at 0
Var square(Var x);
Var sqrt(Var x);
Var exp(Var x);
Var tanh(Var x);
Var sigmoid(Var x);
Var relu(Var x);
Var leaky_relu(Var x, double slope = kLeakySlope);

// Reductions to a one-element tensor.
Var sum(Var x);
Var mean(Var x);

// Convolutions on NCHW tensors. `weight` is [out, in, k, k] with odd k, zero
// same-padding of k/2, and output extent ceil(extent / stride).
std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride);
Var conv2d(Var x, Var weight, std::optional<Var> bias, std::size_t stride);

// Adjoint of conv2d with the same `weight` layout: maps [N, out, h, w] back to
// [N, in, out_h, out_w], where conv2d would map out_h x out_w onto h x w.
Var conv2d_transpose(Var x, Var weight, std::optional<Var> bias, std::size_t stride, std::size_t out_h,
                     std::size_t out_w);

// Per-channel normalization over (N, H, W) using the statistics of the
// current batch, followed by the affine map gamma * x_hat + beta.
Var batch_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

Var reshape(Var x, Shape shape);
Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t count);
Var concat(const std::vector<Var>& parts, std::size_t axis);

// Channel axis of an NCHW tensor.
inline Var slice_channels(Var x, std::size_t begin, std::size_t count) { return slice(x, 1, begin, count); }
inline Var concat_channels(const std::vector<Var>& parts) { return concat(parts, 1); }

// Plain-tensor convolution kernels shared by the graph ops and by tests.
Tensor conv2d_forward(const Tensor& x, const Tensor& weight, const Tensor* bias, std::size_t stride);
Tensor conv2d_transpose_forward(const Tensor& x, const Tensor& weight, const Tensor* bias, std::size_t stride,
                                std::size_t out_h, std::size_t out_w);

}  // namespace vst
