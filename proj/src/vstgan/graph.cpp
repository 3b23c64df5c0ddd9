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

#include "vstgan/graph.hpp"

namespace vst {

const Tensor& Var::value() const {
  if (graph == nullptr) throw Error(ErrorKind::kInvalidArgument, "unbound variable");
  return graph->value(*this);
}

Var Graph::input(Tensor value, bool requires_grad, std::string name) {
  if (!value.all_finite()) {
    throw Error(ErrorKind::kNonFinite, "non-finite value fed to graph input '" + name + "'");
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.name = std::move(name);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Graph::record(const char* op, Tensor value, std::vector<Var> inputs, BackwardFn backward) {
  if (!value.all_finite()) {
    throw Error(ErrorKind::kNonFinite, std::string("op '") + op + "' produced a non-finite output");
  }
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.backward = std::move(backward);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    if (v.graph != this || v.id >= nodes_.size()) {
      throw Error(ErrorKind::kInvalidArgument, std::string("op '") + op + "' received a foreign variable");
    }
    n.inputs.push_back(v.id);
    n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

const Graph::Node& Graph::node(Var v) const {
  if (v.graph != this || v.id >= nodes_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "variable does not belong to this graph");
  }
  return nodes_[v.id];
}

const Tensor& Graph::value(Var v) const { return node(v).value; }

bool Graph::requires_grad(Var v) const { return node(v).requires_grad; }

void Graph::backward(Var output) {
  const Node& out = node(output);
  if (out.value.size() != 1) {
    throw Error(ErrorKind::kShapeMismatch,
                "backward() needs a scalar output, got shape " + to_string(out.value.shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  nodes_[output.id].grad = Tensor(out.value.shape(), 1.0);
  nodes_[output.id].has_grad = true;

  std::vector<Tensor*> slots;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.requires_grad || !n.backward) continue;
    slots.assign(n.inputs.size(), nullptr);
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      Node& in = nodes_[n.inputs[k]];
      if (!in.requires_grad) continue;
      if (!in.has_grad) {
        in.grad = Tensor(in.value.shape(), 0.0);
        in.has_grad = true;
      }
      slots[k] = &in.grad;
    }
    n.backward(BackwardContext{n.grad, slots});
  }
}

Gradient Graph::gradient(Var leaf) const {
  const Node& n = node(leaf);
  if (!n.requires_grad) return Gradient{Tensor(n.value.shape(), 0.0), true};
  if (!n.has_grad) return Gradient{Tensor(n.value.shape(), 0.0), false};
  return Gradient{n.grad, false};
}

void Graph::note_branch(std::uint64_t branch) noexcept {
  std::uint64_t z = signature_ ^ (branch + 0x9E3779B97F4A7C15ull + (signature_ << 6) + (signature_ >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  signature_ = z ^ (z >> 31);
}

}  // namespace vst
