// src/nn.cpp

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

#include "polyaccent/nn.hpp"

#include <cmath>

#include "polyaccent/errors.hpp"
#include "polyaccent/ops.hpp"

namespace polyaccent::nn {

void ParameterSet::add(std::string name, Tensor param) {
  items_.emplace_back(std::move(name), std::move(param));
}

void ParameterSet::append(const ParameterSet& other, const std::string& prefix) {
  for (const auto& [name, t] : other.items_) items_.emplace_back(prefix + name, t);
}

std::size_t ParameterSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& item : items_) n += item.second.numel();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& item : items_) item.second.zero_grad();
}

Tensor uniform_param(Shape shape, Scalar bound, std::mt19937_64& rng) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  std::uniform_real_distribution<Scalar> dist(-bound, bound);
  for (auto& v : t.mutable_values()) v = dist(rng);
  return t;
}

Tensor normal_param(Shape shape, Scalar stddev, std::mt19937_64& rng) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  std::normal_distribution<Scalar> dist(0, stddev);
  for (auto& v : t.mutable_values()) v = dist(rng);
  return t;
}

Linear::Linear(int in, int out, std::mt19937_64& rng) {
  const Scalar bound = 1 / std::sqrt(static_cast<Scalar>(in));
  weight = uniform_param({in, out}, bound, rng);
  bias = uniform_param({out}, bound, rng);
}

Tensor Linear::forward(const Tensor& x) const { return ops::linear(x, weight, bias); }

void Linear::collect(ParameterSet& ps, const std::string& prefix) const {
  ps.add(prefix + "weight", weight);
  ps.add(prefix + "bias", bias);
}

namespace {

Tensor conv_weight(Shape shape, int fan_in, Scalar init_std, std::mt19937_64& rng) {
  if (init_std > 0) return normal_param(std::move(shape), init_std, rng);
  return uniform_param(std::move(shape), 1 / std::sqrt(static_cast<Scalar>(fan_in)), rng);
}

}  // namespace

Conv1d::Conv1d(int cin, int cout, int kernel, int dil, std::mt19937_64& rng,
               Scalar init_std)
    : stride(1), dilation(dil) {
  const int span = (kernel - 1) * dil;
  pad_left = span / 2;
  pad_right = span - pad_left;
  weight = conv_weight({cout, cin, kernel}, cin * kernel, init_std, rng);
  bias = uniform_param({cout}, 1 / std::sqrt(static_cast<Scalar>(cin * kernel)), rng);
}

Conv1d::Conv1d(int cin, int cout, int kernel, int str, int pad, std::mt19937_64& rng,
               Scalar init_std)
    : stride(str), dilation(1), pad_left(pad), pad_right(pad) {
  weight = conv_weight({cout, cin, kernel}, cin * kernel, init_std, rng);
  bias = uniform_param({cout}, 1 / std::sqrt(static_cast<Scalar>(cin * kernel)), rng);
}

Tensor Conv1d::forward(const Tensor& x) const {
  return ops::conv1d(x, weight, bias, stride, dilation, pad_left, pad_right);
}

void Conv1d::collect(ParameterSet& ps, const std::string& prefix) const {
  ps.add(prefix + "weight", weight);
  ps.add(prefix + "bias", bias);
}

ConvTranspose1d::ConvTranspose1d(int cin, int cout, int kernel, int str,
                                 std::mt19937_64& rng, Scalar init_std)
    : stride(str), crop_left((kernel - str) / 2) {
  if (kernel < str) throw InvalidArgument("transposed conv kernel shorter than stride");
  weight = conv_weight({cin, cout, kernel}, cin * kernel / str, init_std, rng);
  bias = uniform_param({cout}, 1 / std::sqrt(static_cast<Scalar>(cin * kernel)), rng);
}

Tensor ConvTranspose1d::forward(const Tensor& x) const {
  return ops::conv_transpose1d(x, weight, bias, stride, crop_left);
}

void ConvTranspose1d::collect(ParameterSet& ps, const std::string& prefix) const {
  ps.add(prefix + "weight", weight);
  ps.add(prefix + "bias", bias);
}

LayerNorm::LayerNorm(int dim)
    : gamma(Tensor::full({dim}, 1, true)), beta(Tensor::zeros({dim}, true)) {}

Tensor LayerNorm::forward(const Tensor& x) const {
  return ops::layer_norm_rows(x, gamma, beta);
}

void LayerNorm::collect(ParameterSet& ps, const std::string& prefix) const {
  ps.add(prefix + "gamma", gamma);
  ps.add(prefix + "beta", beta);
}

MultiHeadSelfAttention::MultiHeadSelfAttention(int dim, int n_heads, std::mt19937_64& rng)
    : query(dim, dim, rng),
      key(dim, dim, rng),
      value(dim, dim, rng),
      output(dim, dim, rng),
      heads(n_heads) {
  if (n_heads < 1 || dim % n_heads != 0)
    throw InvalidArgument("attention width " + std::to_string(dim) +
                          " not divisible by " + std::to_string(n_heads) + " heads");
}

Tensor MultiHeadSelfAttention::forward(const Tensor& x) const {
  const int dim = x.dim(1);
  const int head_dim = dim / heads;
  const Scalar inv_sqrt = 1 / std::sqrt(static_cast<Scalar>(head_dim));
  Tensor q = query.forward(x);
  Tensor k = key.forward(x);
  Tensor v = value.forward(x);
  std::vector<Tensor> per_head;
  per_head.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Tensor qh = ops::slice_cols(q, h * head_dim, head_dim);
    Tensor kh = ops::slice_cols(k, h * head_dim, head_dim);
    Tensor vh = ops::slice_cols(v, h * head_dim, head_dim);
    Tensor scores = ops::scale(ops::matmul(qh, ops::transpose(kh)), inv_sqrt);
    per_head.push_back(ops::matmul(ops::softmax_rows(scores), vh));
  }
  return output.forward(ops::concat_cols(per_head));
}

void MultiHeadSelfAttention::collect(ParameterSet& ps, const std::string& prefix) const {
  query.collect(ps, prefix + "query.");
  key.collect(ps, prefix + "key.");
  value.collect(ps, prefix + "value.");
  output.collect(ps, prefix + "output.");
}

}  // namespace polyaccent::nn
