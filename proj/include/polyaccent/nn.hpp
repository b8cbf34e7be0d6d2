// polyaccent/nn.hpp

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

#ifndef POLYACCENT_NN_HPP_
#define POLYACCENT_NN_HPP_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polyaccent/tensor.hpp"

namespace polyaccent::nn {

// Ordered (name, tensor) list. Names are stable across runs and are the keys
// used in checkpoints.
class ParameterSet {
 public:
  void add(std::string name, Tensor param);
  void append(const ParameterSet& other, const std::string& prefix = "");
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::vector<std::pair<std::string, Tensor>>& items() { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t total_elements() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

// Per-forward switches: dropout and its randomness.
struct ForwardContext {
  bool training = false;
  std::mt19937_64* rng = nullptr;

  std::mt19937_64* dropout_rng() const { return training ? rng : nullptr; }
};

Tensor uniform_param(Shape shape, Scalar bound, std::mt19937_64& rng);
Tensor normal_param(Shape shape, Scalar stddev, std::mt19937_64& rng);

struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]

  Linear() = default;
  Linear(int in, int out, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;  // [t, in] -> [t, out]
  void collect(ParameterSet& ps, const std::string& prefix) const;
};

struct Conv1d {
  Tensor weight;  // [cout, cin, k]
  Tensor bias;    // [cout]
  int stride = 1;
  int dilation = 1;
  int pad_left = 0;
  int pad_right = 0;

  Conv1d() = default;
  // Same-length padding when stride == 1 ("centered" taps).
  Conv1d(int cin, int cout, int kernel, int dilation, std::mt19937_64& rng,
         Scalar init_std = 0);
  Conv1d(int cin, int cout, int kernel, int stride, int pad, std::mt19937_64& rng,
         Scalar init_std = 0);
  Tensor forward(const Tensor& x) const;
  void collect(ParameterSet& ps, const std::string& prefix) const;
};

struct ConvTranspose1d {
  Tensor weight;  // [cin, cout, k]
  Tensor bias;
  int stride = 1;
  int crop_left = 0;

  ConvTranspose1d() = default;
  ConvTranspose1d(int cin, int cout, int kernel, int stride, std::mt19937_64& rng,
                  Scalar init_std = 0);
  Tensor forward(const Tensor& x) const;  // [cin, t] -> [cout, t * stride]
  void collect(ParameterSet& ps, const std::string& prefix) const;
};

struct LayerNorm {
  Tensor gamma;
  Tensor beta;

  LayerNorm() = default;
  explicit LayerNorm(int dim);
  Tensor forward(const Tensor& x) const;  // normalizes each row of [t, dim]
  void collect(ParameterSet& ps, const std::string& prefix) const;
};

// Full (unmasked) scaled dot-product self-attention over the rows of [t, d].
struct MultiHeadSelfAttention {
  Linear query, key, value, output;
  int heads = 1;

  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(int dim, int heads, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void collect(ParameterSet& ps, const std::string& prefix) const;
};

}  // namespace polyaccent::nn

#endif  // POLYACCENT_NN_HPP_
