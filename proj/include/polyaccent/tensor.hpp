// polyaccent/tensor.hpp

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

#ifndef POLYACCENT_TENSOR_HPP_
#define POLYACCENT_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace polyaccent {

using Scalar = double;
using Shape = std::vector<int>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
  std::vector<Scalar> value;
  std::vector<Scalar> grad;  // empty until something flows into it
  Shape shape;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents' grads.
  std::function<void(Node& self)> backward_fn;

  std::span<Scalar> grad_buffer();
};

}  // namespace detail

// Dense row-major tensor with reverse-mode differentiation.
//
// A Tensor is a shared handle: copies alias the same storage. Operations in
// ops.hpp build a graph only when at least one input requires a gradient and
// gradient recording is enabled (see NoGradGuard).
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Scalar value, bool requires_grad = false);
  static Tensor from(std::vector<Scalar> values, Shape shape,
                     bool requires_grad = false);
  static Tensor scalar(Scalar value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  int dim(int axis) const;
  std::size_t numel() const;

  std::span<const Scalar> values() const;
  // Direct writes bypass the graph; only meant for parameters and inputs.
  std::span<Scalar> mutable_values();
  std::span<const Scalar> grad() const;  // empty if nothing accumulated
  std::span<Scalar> mutable_grad();      // allocates zeros on demand
  Scalar item() const;
  Scalar at(std::size_t flat_index) const { return values()[flat_index]; }

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  void zero_grad();

  // Seeds d(self)/d(self) = 1; self must hold exactly one element.
  void backward() const;

  // Same values, no history.
  Tensor detach() const;
  Tensor clone() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// Disables graph construction on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

namespace detail {

using BackwardFn = std::function<void(Node& self)>;

// Wraps a freshly computed value as an op result. The backward closure is
// kept only if some input participates in differentiation.
Tensor make_result(std::vector<Scalar> value, Shape shape,
                   std::initializer_list<Tensor> inputs, BackwardFn fn);
Tensor make_result(std::vector<Scalar> value, Shape shape,
                   const std::vector<Tensor>& inputs, BackwardFn fn);

}  // namespace detail

}  // namespace polyaccent

#endif  // POLYACCENT_TENSOR_HPP_
