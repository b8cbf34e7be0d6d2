// polyaccent/ops.hpp

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

#ifndef POLYACCENT_OPS_HPP_
#define POLYACCENT_OPS_HPP_

#include <random>
#include <vector>

#include "polyaccent/tensor.hpp"

// Differentiable tensor operations. Sequence matrices are [time, features];
// convolution tensors are channel-first [channels, time] or
// [channels, time, width] for column-wise (k, 1) filtering.
namespace polyaccent::ops {

// elementwise
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Scalar factor);
Tensor add_scalar(const Tensor& a, Scalar value);
Tensor leaky_relu(const Tensor& x, Scalar slope);
Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log(const Tensor& x);
Tensor square(const Tensor& x);
// Gradient passes only where lo <= x <= hi.
Tensor clamp(const Tensor& x, Scalar lo, Scalar hi);
// Inverted dropout; identity when rng is null or p == 0.
Tensor dropout(const Tensor& x, Scalar p, std::mt19937_64* rng);

// reductions to a single element (shape [1])
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mean_abs_diff(const Tensor& a, const Tensor& b);
// mean((x - target)^2)
Tensor mean_sq_dev(const Tensor& x, Scalar target);
Tensor add_n(const std::vector<Tensor>& scalars);

// shape manipulation
Tensor reshape(const Tensor& x, Shape shape);
Tensor transpose(const Tensor& x);  // rank 2
Tensor slice_cols(const Tensor& x, int begin, int count);
Tensor slice_rows(const Tensor& x, int begin, int count);
Tensor concat_cols(const std::vector<Tensor>& parts);
// Every input row repeated factor times in place: [a, b] -> [a, a, b, b].
Tensor repeat_rows(const Tensor& x, int factor);
// [d] -> [rows, d]
Tensor broadcast_row(const Tensor& v, int rows);
// row index of [n, d] -> [d]
Tensor gather_row(const Tensor& table, int index);
// [t, d] -> [d]
Tensor mean_rows(const Tensor& x);

// linear algebra / layers
Tensor matmul(const Tensor& a, const Tensor& b);
// x [t, in] * weight [in, out] + bias [out]
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
Tensor softmax_rows(const Tensor& x);
Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       Scalar eps = 1e-5);
// x [cin, t(, w)], weight [cout, cin, k], bias [cout] or undefined.
// Zero padding of pad_left / pad_right samples on the time axis.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int stride, int dilation, int pad_left, int pad_right);
// x [cin, t], weight [cin, cout, k]. Output has exactly t * stride samples;
// crop_left samples are removed from the start of the full transposed result.
Tensor conv_transpose1d(const Tensor& x, const Tensor& weight,
                        const Tensor& bias, int stride, int crop_left);
// x [c, t]; zero-padded average pooling that counts padding in the divisor.
Tensor avg_pool1d(const Tensor& x, int kernel, int stride, int pad);
// x [c, t] -> [c, ceil(t / period), period], reflect-padding the tail.
Tensor fold_period(const Tensor& x, int period);

}  // namespace polyaccent::ops

#endif  // POLYACCENT_OPS_HPP_
