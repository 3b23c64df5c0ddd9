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
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vstgan/tensor.hpp"

namespace vst {

class Graph;

// Handle to a node recorded in a Graph. Cheap to copy; only valid while the
// owning Graph is alive.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t dim(std::size_t axis) const { return shape().at(axis); }
};

struct Gradient {
  Tensor value;
  bool detached = false;  // leaf was recorded without requires_grad
};

// Tape for reverse-mode differentiation. Nodes are appended in evaluation
// order, so the tape is topologically sorted by construction.
class Graph {
 public:
  struct BackwardContext {
    const Tensor& grad;                  // d(output) / d(this node)
    std::span<Tensor* const> inputs;     // gradient accumulators, nullptr if not needed
  };
  using BackwardFn = std::function<void(const BackwardContext&)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Tensor value, bool requires_grad = false, std::string name = {});
  Var constant(Tensor value) { return input(std::move(value), false); }

  // Appends an operation node. Rejects non-finite outputs, naming `op`.
  Var record(const char* op, Tensor value, std::vector<Var> inputs, BackwardFn backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  // Piecewise ops (relu, abs, clamps, order statistics) fold the branch each
  // element took into a running signature. Two evaluations with equal
  // signatures ran on the same smooth piece.
  void note_branch(std::uint64_t branch) noexcept;
  std::uint64_t branch_signature() const noexcept { return signature_; }

  // Propagates d(output)/d(node) to every node that requires a gradient.
  void backward(Var output);
  Gradient gradient(Var leaf) const;

 private:
  struct Node {
    const char* op = "input";
    Tensor value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    std::string name;
    Tensor grad;
    bool has_grad = false;
  };

  const Node& node(Var v) const;

  std::deque<Node> nodes_;  // stable addresses: value() references survive later records
  std::uint64_t signature_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace vst
