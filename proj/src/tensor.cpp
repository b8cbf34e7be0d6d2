// src/tensor.cpp

// Copyright 2026  polyaccent authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "polyaccent/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "polyaccent/errors.hpp"

namespace polyaccent {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension in " + shape_str(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail {

std::span<Scalar> Node::grad_buffer() {
  if (grad.size() != value.size()) grad.assign(value.size(), Scalar(0));
  return grad;
}

Tensor make_result(std::vector<Scalar> value, Shape shape,
                   const std::vector<Tensor>& inputs, BackwardFn fn) {
  if (shape_numel(shape) != value.size())
    throw ShapeError("op result holds " + std::to_string(value.size()) +
                     " values but shape is " + shape_str(shape));
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->shape = std::move(shape);
  if (g_grad_enabled) {
    bool any = false;
    for (const Tensor& t : inputs)
      if (t.defined() && t.requires_grad()) any = true;
    if (any) {
      node->requires_grad = true;
      node->is_leaf = false;
      node->parents.reserve(inputs.size());
      for (const Tensor& t : inputs) node->parents.push_back(t.node());
      node->backward_fn = std::move(fn);
    }
  }
  return Tensor(std::move(node));
}

Tensor make_result(std::vector<Scalar> value, Shape shape,
                   std::initializer_list<Tensor> inputs, BackwardFn fn) {
  return make_result(std::move(value), std::move(shape),
                     std::vector<Tensor>(inputs), std::move(fn));
}

}  // namespace detail

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), Scalar(0), requires_grad);
}

Tensor Tensor::full(Shape shape, Scalar value, bool requires_grad) {
  auto node = std::make_shared<detail::Node>();
  node->value.assign(shape_numel(shape), value);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from(std::vector<Scalar> values, Shape shape, bool requires_grad) {
  if (shape_numel(shape) != values.size())
    throw ShapeError("Tensor::from: " + std::to_string(values.size()) +
                     " values for shape " + shape_str(shape));
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(values);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(Scalar value) { return from({value}, {1}); }

const Shape& Tensor::shape() const { return node_->shape; }

int Tensor::dim(int axis) const {
  const Shape& s = shape();
  if (axis < 0) axis += static_cast<int>(s.size());
  if (axis < 0 || axis >= static_cast<int>(s.size()))
    throw ShapeError("axis out of range for shape " + shape_str(s));
  return s[static_cast<std::size_t>(axis)];
}

std::size_t Tensor::numel() const { return node_->value.size(); }

std::span<const Scalar> Tensor::values() const { return node_->value; }
std::span<Scalar> Tensor::mutable_values() { return node_->value; }
std::span<const Scalar> Tensor::grad() const { return node_->grad; }
std::span<Scalar> Tensor::mutable_grad() { return node_->grad_buffer(); }

Scalar Tensor::item() const {
  if (numel() != 1)
    throw ShapeError("item() on tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool flag) {
  if (!node_->is_leaf)
    throw InvalidArgument("set_requires_grad on a non-leaf tensor");
  node_->requires_grad = flag;
}

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), Scalar(0));
}

void Tensor::backward() const {
  if (numel() != 1)
    throw ShapeError("backward() needs a single-element tensor, got " +
                     shape_str(shape()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order of the graph.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && !parent->is_leaf && !seen.count(parent)) {
        seen.insert(parent);
        stack.emplace_back(parent, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  node_->grad_buffer()[0] += Scalar(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
  }
  // Interior gradients are scratch; only leaves accumulate across calls.
  for (detail::Node* node : order) {
    if (!node->is_leaf) {
      node->grad.clear();
      node->grad.shrink_to_fit();
    }
  }
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<detail::Node>();
  node->value = node_->value;
  node->shape = node_->shape;
  return Tensor(std::move(node));
}

Tensor Tensor::clone() const {
  Tensor t = detach();
  t.node_->requires_grad = node_->requires_grad && node_->is_leaf;
  return t;
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

}  // namespace polyaccent
