// src/ops.cpp

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

#include "polyaccent/ops.hpp"

#include <algorithm>
#include <cmath>

#include "polyaccent/errors.hpp"
#include "polyaccent/kernels.hpp"

namespace polyaccent::ops {

using detail::make_result;
using detail::Node;

namespace {

// Parent i's gradient buffer, or an empty span if it takes no gradient.
std::span<Scalar> pgrad(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return {};
  return p.grad_buffer();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
}

void require_rank(const Tensor& x, int rank, const char* op) {
  if (x.rank() != rank)
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     ", got " + shape_str(x.shape()));
}

template <class F, class D>
Tensor unary(const Tensor& x, F f, D dfdx) {
  auto xv = x.values();
  std::vector<Scalar> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return make_result(std::move(out), x.shape(), {x}, [dfdx](Node& self) {
    auto g = pgrad(self, 0);
    const auto& xin = self.parents[0]->value;
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] += self.grad[i] * dfdx(xin[i], self.value[i]);
  });
}

}  // namespace

// ------------------------------------------------------------ elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<Scalar> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return make_result(std::move(out), a.shape(), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      auto g = pgrad(self, p);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<Scalar> out(a.values().begin(), a.values().end());
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return make_result(std::move(out), a.shape(), {a, b}, [](Node& self) {
    auto ga = pgrad(self, 0);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
    auto gb = pgrad(self, 1);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  auto av = a.values();
  auto bv = b.values();
  std::vector<Scalar> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_result(std::move(out), a.shape(), {a, b}, [](Node& self) {
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    auto ga = pgrad(self, 0);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * bv[i];
    auto gb = pgrad(self, 1);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += self.grad[i] * av[i];
  });
}

Tensor scale(const Tensor& a, Scalar factor) {
  return unary(a, [factor](Scalar v) { return v * factor; },
               [factor](Scalar, Scalar) { return factor; });
}

Tensor add_scalar(const Tensor& a, Scalar value) {
  return unary(a, [value](Scalar v) { return v + value; },
               [](Scalar, Scalar) { return Scalar(1); });
}

Tensor leaky_relu(const Tensor& x, Scalar slope) {
  return unary(x, [slope](Scalar v) { return v > 0 ? v : v * slope; },
               [slope](Scalar v, Scalar) { return v > 0 ? Scalar(1) : slope; });
}

Tensor relu(const Tensor& x) { return leaky_relu(x, 0); }

Tensor tanh(const Tensor& x) {
  return unary(x, [](Scalar v) { return std::tanh(v); },
               [](Scalar, Scalar y) { return 1 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](Scalar v) {
        if (v >= 0) return 1 / (1 + std::exp(-v));
        const Scalar e = std::exp(v);
        return e / (1 + e);
      },
      [](Scalar, Scalar y) { return y * (1 - y); });
}

Tensor log(const Tensor& x) {
  return unary(x, [](Scalar v) { return std::log(v); },
               [](Scalar v, Scalar) { return 1 / v; });
}

Tensor square(const Tensor& x) {
  return unary(x, [](Scalar v) { return v * v; },
               [](Scalar v, Scalar) { return 2 * v; });
}

Tensor clamp(const Tensor& x, Scalar lo, Scalar hi) {
  return unary(x, [lo, hi](Scalar v) { return std::clamp(v, lo, hi); },
               [lo, hi](Scalar v, Scalar) {
                 return (v >= lo && v <= hi) ? Scalar(1) : Scalar(0);
               });
}

Tensor dropout(const Tensor& x, Scalar p, std::mt19937_64* rng) {
  if (rng == nullptr || p <= 0) return x;
  if (p >= 1) throw InvalidArgument("dropout probability must be < 1");
  std::bernoulli_distribution keep(1 - p);
  const Scalar inv = 1 / (1 - p);
  std::vector<Scalar> mask(x.numel());
  for (auto& m : mask) m = keep(*rng) ? inv : Scalar(0);
  auto xv = x.values();
  std::vector<Scalar> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return make_result(std::move(out), x.shape(), {x},
                     [mask = std::move(mask)](Node& self) {
                       auto g = pgrad(self, 0);
                       for (std::size_t i = 0; i < g.size(); ++i)
                         g[i] += self.grad[i] * mask[i];
                     });
}

// ------------------------------------------------------------ reductions

Tensor sum(const Tensor& x) {
  Scalar acc = 0;
  for (Scalar v : x.values()) acc += v;
  return make_result({acc}, {1}, {x}, [](Node& self) {
    auto g = pgrad(self, 0);
    for (auto& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw InvalidArgument("mean of an empty tensor");
  return scale(sum(x), Scalar(1) / static_cast<Scalar>(x.numel()));
}

Tensor mean_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mean_abs_diff");
  if (a.numel() == 0) throw InvalidArgument("mean_abs_diff of empty tensors");
  auto av = a.values();
  auto bv = b.values();
  Scalar acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(av[i] - bv[i]);
  const Scalar n = static_cast<Scalar>(av.size());
  return make_result({acc / n}, {1}, {a, b}, [n](Node& self) {
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    const Scalar g0 = self.grad[0] / n;
    auto ga = pgrad(self, 0);
    auto gb = pgrad(self, 1);
    for (std::size_t i = 0; i < av.size(); ++i) {
      const Scalar d = av[i] - bv[i];
      const Scalar s = d > 0 ? g0 : (d < 0 ? -g0 : Scalar(0));
      if (!ga.empty()) ga[i] += s;
      if (!gb.empty()) gb[i] -= s;
    }
  });
}

Tensor mean_sq_dev(const Tensor& x, Scalar target) {
  if (x.numel() == 0) throw InvalidArgument("mean_sq_dev of an empty tensor");
  auto xv = x.values();
  Scalar acc = 0;
  for (Scalar v : xv) acc += (v - target) * (v - target);
  const Scalar n = static_cast<Scalar>(xv.size());
  return make_result({acc / n}, {1}, {x}, [n, target](Node& self) {
    const auto& xv = self.parents[0]->value;
    auto g = pgrad(self, 0);
    const Scalar g0 = self.grad[0] * 2 / n;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += g0 * (xv[i] - target);
  });
}

Tensor add_n(const std::vector<Tensor>& scalars) {
  if (scalars.empty()) return Tensor::scalar(0);
  Scalar acc = 0;
  for (const Tensor& s : scalars) acc += s.item();
  return make_result({acc}, {1}, scalars, [](Node& self) {
    for (std::size_t p = 0; p < self.parents.size(); ++p) {
      auto g = pgrad(self, p);
      if (!g.empty()) g[0] += self.grad[0];
    }
  });
}

// ------------------------------------------------------------ shapes

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    throw ShapeError("reshape " + shape_str(x.shape()) + " -> " + shape_str(shape));
  std::vector<Scalar> out(x.values().begin(), x.values().end());
  return make_result(std::move(out), std::move(shape), {x}, [](Node& self) {
    auto g = pgrad(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor transpose(const Tensor& x) {
  require_rank(x, 2, "transpose");
  const int r = x.dim(0), c = x.dim(1);
  auto xv = x.values();
  std::vector<Scalar> out(xv.size());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out[static_cast<std::size_t>(j) * r + i] = xv[static_cast<std::size_t>(i) * c + j];
  return make_result(std::move(out), {c, r}, {x}, [r, c](Node& self) {
    auto g = pgrad(self, 0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        g[static_cast<std::size_t>(i) * c + j] += self.grad[static_cast<std::size_t>(j) * r + i];
  });
}

Tensor slice_cols(const Tensor& x, int begin, int count) {
  require_rank(x, 2, "slice_cols");
  const int r = x.dim(0), c = x.dim(1);
  if (begin < 0 || count < 0 || begin + count > c)
    throw ShapeError("slice_cols out of range");
  auto xv = x.values();
  std::vector<Scalar> out(static_cast<std::size_t>(r) * count);
  for (int i = 0; i < r; ++i)
    std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(i) * c + begin, count,
                out.begin() + static_cast<std::ptrdiff_t>(i) * count);
  return make_result(std::move(out), {r, count}, {x},
                     [r, c, begin, count](Node& self) {
                       auto g = pgrad(self, 0);
                       for (int i = 0; i < r; ++i)
                         for (int j = 0; j < count; ++j)
                           g[static_cast<std::size_t>(i) * c + begin + j] +=
                               self.grad[static_cast<std::size_t>(i) * count + j];
                     });
}

Tensor slice_rows(const Tensor& x, int begin, int count) {
  require_rank(x, 2, "slice_rows");
  const int r = x.dim(0), c = x.dim(1);
  if (begin < 0 || count < 0 || begin + count > r)
    throw ShapeError("slice_rows out of range");
  auto xv = x.values();
  const auto off = static_cast<std::ptrdiff_t>(begin) * c;
  std::vector<Scalar> out(xv.begin() + off,
                          xv.begin() + off + static_cast<std::ptrdiff_t>(count) * c);
  return make_result(std::move(out), {count, c}, {x}, [off](Node& self) {
    auto g = pgrad(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      g[static_cast<std::size_t>(off) + i] += self.grad[i];
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const int r = parts.front().dim(0);
  std::vector<int> widths;
  int total = 0;
  for (const Tensor& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.dim(0) != r) throw ShapeError("concat_cols row mismatch");
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<Scalar> out(static_cast<std::size_t>(r) * total);
  int col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto pv = parts[k].values();
    const int w = widths[k];
    for (int i = 0; i < r; ++i)
      std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(i) * w, w,
                  out.begin() + static_cast<std::ptrdiff_t>(i) * total + col);
    col += w;
  }
  return make_result(std::move(out), {r, total}, parts,
                     [r, total, widths](Node& self) {
                       int col = 0;
                       for (std::size_t k = 0; k < widths.size(); ++k) {
                         const int w = widths[k];
                         auto g = pgrad(self, k);
                         if (!g.empty())
                           for (int i = 0; i < r; ++i)
                             for (int j = 0; j < w; ++j)
                               g[static_cast<std::size_t>(i) * w + j] +=
                                   self.grad[static_cast<std::size_t>(i) * total + col + j];
                         col += w;
                       }
                     });
}

Tensor repeat_rows(const Tensor& x, int factor) {
  require_rank(x, 2, "repeat_rows");
  if (factor < 1) throw InvalidArgument("repeat factor must be >= 1");
  const int r = x.dim(0), c = x.dim(1);
  auto xv = x.values();
  std::vector<Scalar> out(static_cast<std::size_t>(r) * factor * c);
  for (int i = 0; i < r; ++i)
    for (int f = 0; f < factor; ++f)
      std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(i) * c, c,
                  out.begin() + (static_cast<std::ptrdiff_t>(i) * factor + f) * c);
  return make_result(std::move(out), {r * factor, c}, {x},
                     [r, c, factor](Node& self) {
                       auto g = pgrad(self, 0);
                       for (int i = 0; i < r; ++i)
                         for (int f = 0; f < factor; ++f)
                           for (int j = 0; j < c; ++j)
                             g[static_cast<std::size_t>(i) * c + j] +=
                                 self.grad[(static_cast<std::size_t>(i) * factor + f) * c + j];
                     });
}

Tensor broadcast_row(const Tensor& v, int rows) {
  if (rows < 0) throw InvalidArgument("broadcast_row: negative row count");
  const int d = static_cast<int>(v.numel());
  auto vv = v.values();
  std::vector<Scalar> out(static_cast<std::size_t>(rows) * d);
  for (int i = 0; i < rows; ++i)
    std::copy(vv.begin(), vv.end(), out.begin() + static_cast<std::ptrdiff_t>(i) * d);
  return make_result(std::move(out), {rows, d}, {v}, [rows, d](Node& self) {
    auto g = pgrad(self, 0);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < d; ++j) g[j] += self.grad[static_cast<std::size_t>(i) * d + j];
  });
}

Tensor gather_row(const Tensor& table, int index) {
  require_rank(table, 2, "gather_row");
  const int n = table.dim(0), d = table.dim(1);
  if (index < 0 || index >= n) throw InvalidArgument("gather_row index out of range");
  auto tv = table.values();
  const auto off = static_cast<std::ptrdiff_t>(index) * d;
  std::vector<Scalar> out(tv.begin() + off, tv.begin() + off + d);
  return make_result(std::move(out), {d}, {table}, [off, d](Node& self) {
    auto g = pgrad(self, 0);
    for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(off + j)] += self.grad[j];
  });
}

Tensor mean_rows(const Tensor& x) {
  require_rank(x, 2, "mean_rows");
  const int r = x.dim(0), c = x.dim(1);
  if (r == 0) throw InvalidArgument("mean over zero rows");
  auto xv = x.values();
  std::vector<Scalar> out(static_cast<std::size_t>(c), 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out[j] += xv[static_cast<std::size_t>(i) * c + j];
  for (auto& v : out) v /= r;
  return make_result(std::move(out), {c}, {x}, [r, c](Node& self) {
    auto g = pgrad(self, 0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) g[static_cast<std::size_t>(i) * c + j] += self.grad[j] / r;
  });
}

// ------------------------------------------------------------ layers

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw ShapeError("matmul " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  std::vector<Scalar> out(static_cast<std::size_t>(m) * n);
  kernels::gemm(false, false, m, n, k, a.values().data(), b.values().data(),
                out.data(), false);
  return make_result(std::move(out), {m, n}, {a, b}, [m, n, k](Node& self) {
    const Scalar* av = self.parents[0]->value.data();
    const Scalar* bv = self.parents[1]->value.data();
    auto ga = pgrad(self, 0);
    if (!ga.empty())  // dA = dC * B^T
      kernels::gemm(false, true, m, k, n, self.grad.data(), bv, ga.data(), true);
    auto gb = pgrad(self, 1);
    if (!gb.empty())  // dB = A^T * dC
      kernels::gemm(true, false, k, n, m, av, self.grad.data(), gb.data(), true);
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(x, 2, "linear");
  require_rank(weight, 2, "linear");
  const int t = x.dim(0), in = x.dim(1), out_dim = weight.dim(1);
  if (weight.dim(0) != in)
    throw ShapeError("linear: input width " + std::to_string(in) +
                     " vs weight " + shape_str(weight.shape()));
  if (bias.defined() && static_cast<int>(bias.numel()) != out_dim)
    throw ShapeError("linear: bias size mismatch");
  std::vector<Scalar> out(static_cast<std::size_t>(t) * out_dim);
  if (bias.defined()) {
    auto bv = bias.values();
    for (int i = 0; i < t; ++i)
      std::copy(bv.begin(), bv.end(), out.begin() + static_cast<std::ptrdiff_t>(i) * out_dim);
  }
  kernels::gemm(false, false, t, out_dim, in, x.values().data(),
                weight.values().data(), out.data(), true);
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(std::move(out), {t, out_dim}, inputs,
                     [t, in, out_dim](Node& self) {
                       const Scalar* xv = self.parents[0]->value.data();
                       const Scalar* wv = self.parents[1]->value.data();
                       auto gx = pgrad(self, 0);
                       if (!gx.empty())
                         kernels::gemm(false, true, t, in, out_dim, self.grad.data(),
                                       wv, gx.data(), true);
                       auto gw = pgrad(self, 1);
                       if (!gw.empty())
                         kernels::gemm(true, false, in, out_dim, t, xv,
                                       self.grad.data(), gw.data(), true);
                       if (self.parents.size() > 2) {
                         auto gb = pgrad(self, 2);
                         if (!gb.empty())
                           for (int i = 0; i < t; ++i)
                             for (int j = 0; j < out_dim; ++j)
                               gb[j] += self.grad[static_cast<std::size_t>(i) * out_dim + j];
                       }
                     });
}

Tensor softmax_rows(const Tensor& x) {
  require_rank(x, 2, "softmax_rows");
  const int r = x.dim(0), c = x.dim(1);
  auto xv = x.values();
  std::vector<Scalar> out(xv.size());
  for (int i = 0; i < r; ++i) {
    const Scalar* row = xv.data() + static_cast<std::size_t>(i) * c;
    Scalar* o = out.data() + static_cast<std::size_t>(i) * c;
    const Scalar mx = *std::max_element(row, row + c);
    Scalar total = 0;
    for (int j = 0; j < c; ++j) total += (o[j] = std::exp(row[j] - mx));
    for (int j = 0; j < c; ++j) o[j] /= total;
  }
  return make_result(std::move(out), {r, c}, {x}, [r, c](Node& self) {
    auto g = pgrad(self, 0);
    for (int i = 0; i < r; ++i) {
      const Scalar* y = self.value.data() + static_cast<std::size_t>(i) * c;
      const Scalar* gy = self.grad.data() + static_cast<std::size_t>(i) * c;
      Scalar dot = 0;
      for (int j = 0; j < c; ++j) dot += y[j] * gy[j];
      for (int j = 0; j < c; ++j) g[static_cast<std::size_t>(i) * c + j] += y[j] * (gy[j] - dot);
    }
  });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       Scalar eps) {
  require_rank(x, 2, "layer_norm_rows");
  const int r = x.dim(0), c = x.dim(1);
  if (static_cast<int>(gamma.numel()) != c || static_cast<int>(beta.numel()) != c)
    throw ShapeError("layer_norm_rows: affine size mismatch");
  auto xv = x.values();
  auto gv = gamma.values();
  auto bv = beta.values();
  std::vector<Scalar> out(xv.size());
  std::vector<Scalar> xhat(xv.size());
  std::vector<Scalar> inv_std(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    const Scalar* row = xv.data() + static_cast<std::size_t>(i) * c;
    Scalar mu = 0;
    for (int j = 0; j < c; ++j) mu += row[j];
    mu /= c;
    Scalar var = 0;
    for (int j = 0; j < c; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= c;
    const Scalar is = 1 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(i)] = is;
    for (int j = 0; j < c; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * c + j;
      xhat[idx] = (row[j] - mu) * is;
      out[idx] = xhat[idx] * gv[j] + bv[j];
    }
  }
  return make_result(
      std::move(out), {r, c}, {x, gamma, beta},
      [r, c, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        const auto& gv = self.parents[1]->value;
        auto gx = pgrad(self, 0);
        auto gg = pgrad(self, 1);
        auto gb = pgrad(self, 2);
        for (int i = 0; i < r; ++i) {
          const std::size_t base = static_cast<std::size_t>(i) * c;
          Scalar sum_g = 0, sum_gx = 0;
          for (int j = 0; j < c; ++j) {
            const Scalar gy = self.grad[base + j];
            if (!gg.empty()) gg[j] += gy * xhat[base + j];
            if (!gb.empty()) gb[j] += gy;
            const Scalar gh = gy * gv[j];
            sum_g += gh;
            sum_gx += gh * xhat[base + j];
          }
          if (gx.empty()) continue;
          const Scalar is = inv_std[static_cast<std::size_t>(i)];
          for (int j = 0; j < c; ++j) {
            const Scalar gh = self.grad[base + j] * gv[j];
            gx[base + j] += is * (gh - sum_g / c - xhat[base + j] * sum_gx / c);
          }
        }
      });
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int stride, int dilation, int pad_left, int pad_right) {
  if (x.rank() != 2 && x.rank() != 3)
    throw ShapeError("conv1d expects [c, t] or [c, t, w], got " + shape_str(x.shape()));
  require_rank(weight, 3, "conv1d weight");
  kernels::Conv1dGeometry g;
  g.cin = x.dim(0);
  g.t_in = x.dim(1);
  g.width = x.rank() == 3 ? x.dim(2) : 1;
  g.cout = weight.dim(0);
  g.kernel = weight.dim(2);
  g.stride = stride;
  g.dilation = dilation;
  g.pad_left = pad_left;
  if (weight.dim(1) != g.cin)
    throw ShapeError("conv1d: input has " + std::to_string(g.cin) +
                     " channels, weight expects " + std::to_string(weight.dim(1)));
  if (stride < 1 || dilation < 1 || pad_left < 0 || pad_right < 0)
    throw InvalidArgument("conv1d: bad stride/dilation/padding");
  const int span = (g.kernel - 1) * dilation + 1;
  const int padded = g.t_in + pad_left + pad_right;
  if (padded < span)
    throw ShapeError("conv1d: input length " + std::to_string(g.t_in) +
                     " shorter than receptive field " + std::to_string(span));
  g.t_out = (padded - span) / stride + 1;
  if (bias.defined() && static_cast<int>(bias.numel()) != g.cout)
    throw ShapeError("conv1d: bias size mismatch");
  std::vector<Scalar> out(static_cast<std::size_t>(g.cout) * g.t_out * g.width);
  kernels::conv1d_forward(g, x.values().data(), weight.values().data(),
                          bias.defined() ? bias.values().data() : nullptr, out.data());
  Shape shape = x.rank() == 3 ? Shape{g.cout, g.t_out, g.width} : Shape{g.cout, g.t_out};
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(std::move(out), std::move(shape), inputs, [g](Node& self) {
    auto gx = pgrad(self, 0);
    if (!gx.empty())
      kernels::conv1d_backward_input(g, self.grad.data(), self.parents[1]->value.data(),
                                     gx.data());
    auto gw = pgrad(self, 1);
    std::span<Scalar> gb;
    if (self.parents.size() > 2) gb = pgrad(self, 2);
    if (!gw.empty() || !gb.empty()) {
      std::vector<Scalar> scratch;
      Scalar* gw_ptr = gw.data();
      if (gw.empty()) {
        scratch.assign(self.parents[1]->value.size(), 0);
        gw_ptr = scratch.data();
      }
      kernels::conv1d_backward_params(g, self.grad.data(),
                                      self.parents[0]->value.data(), gw_ptr,
                                      gb.empty() ? nullptr : gb.data());
    }
  });
}

Tensor conv_transpose1d(const Tensor& x, const Tensor& weight,
                        const Tensor& bias, int stride, int crop_left) {
  require_rank(x, 2, "conv_transpose1d");
  require_rank(weight, 3, "conv_transpose1d weight");
  kernels::ConvTranspose1dGeometry g;
  g.cin = x.dim(0);
  g.t_in = x.dim(1);
  g.cout = weight.dim(1);
  g.kernel = weight.dim(2);
  g.stride = stride;
  g.crop_left = crop_left;
  g.t_out = g.t_in * stride;
  if (weight.dim(0) != g.cin) throw ShapeError("conv_transpose1d: channel mismatch");
  if (stride < 1 || crop_left < 0) throw InvalidArgument("conv_transpose1d: bad geometry");
  if (bias.defined() && static_cast<int>(bias.numel()) != g.cout)
    throw ShapeError("conv_transpose1d: bias size mismatch");
  std::vector<Scalar> out(static_cast<std::size_t>(g.cout) * g.t_out);
  kernels::conv_transpose1d_forward(g, x.values().data(), weight.values().data(),
                                    bias.defined() ? bias.values().data() : nullptr,
                                    out.data());
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(std::move(out), {g.cout, g.t_out}, inputs, [g](Node& self) {
    auto gx = pgrad(self, 0);
    if (!gx.empty())
      kernels::conv_transpose1d_backward_input(g, self.grad.data(),
                                               self.parents[1]->value.data(), gx.data());
    auto gw = pgrad(self, 1);
    std::span<Scalar> gb;
    if (self.parents.size() > 2) gb = pgrad(self, 2);
    if (!gw.empty() || !gb.empty()) {
      std::vector<Scalar> scratch;
      Scalar* gw_ptr = gw.data();
      if (gw.empty()) {
        scratch.assign(self.parents[1]->value.size(), 0);
        gw_ptr = scratch.data();
      }
      kernels::conv_transpose1d_backward_params(g, self.grad.data(),
                                                self.parents[0]->value.data(), gw_ptr,
                                                gb.empty() ? nullptr : gb.data());
    }
  });
}

Tensor avg_pool1d(const Tensor& x, int kernel, int stride, int pad) {
  require_rank(x, 2, "avg_pool1d");
  if (kernel < 1 || stride < 1 || pad < 0) throw InvalidArgument("avg_pool1d geometry");
  const int c = x.dim(0), t = x.dim(1);
  const int t_out = (t + 2 * pad - kernel) / stride + 1;
  if (t_out < 1) throw ShapeError("avg_pool1d: input too short");
  auto xv = x.values();
  std::vector<Scalar> out(static_cast<std::size_t>(c) * t_out, 0);
  for (int ch = 0; ch < c; ++ch)
    for (int o = 0; o < t_out; ++o) {
      Scalar acc = 0;
      for (int k = 0; k < kernel; ++k) {
        const int src = o * stride + k - pad;
        if (src >= 0 && src < t) acc += xv[static_cast<std::size_t>(ch) * t + src];
      }
      out[static_cast<std::size_t>(ch) * t_out + o] = acc / kernel;
    }
  return make_result(std::move(out), {c, t_out}, {x},
                     [c, t, t_out, kernel, stride, pad](Node& self) {
                       auto g = pgrad(self, 0);
                       for (int ch = 0; ch < c; ++ch)
                         for (int o = 0; o < t_out; ++o) {
                           const Scalar go =
                               self.grad[static_cast<std::size_t>(ch) * t_out + o] / kernel;
                           for (int k = 0; k < kernel; ++k) {
                             const int src = o * stride + k - pad;
                             if (src >= 0 && src < t) g[static_cast<std::size_t>(ch) * t + src] += go;
                           }
                         }
                     });
}

Tensor fold_period(const Tensor& x, int period) {
  require_rank(x, 2, "fold_period");
  if (period < 1) throw InvalidArgument("fold_period: period must be >= 1");
  const int c = x.dim(0), t = x.dim(1);
  const int rows = (t + period - 1) / period;
  const int padded = rows * period;
  if (padded - t >= t && padded != t)
    throw ShapeError("fold_period: signal too short to reflect-pad");
  // Source index for each padded position: reflect about the last sample.
  std::vector<int> src(static_cast<std::size_t>(padded));
  for (int i = 0; i < padded; ++i) src[static_cast<std::size_t>(i)] = i < t ? i : 2 * (t - 1) - i;
  auto xv = x.values();
  std::vector<Scalar> out(static_cast<std::size_t>(c) * padded);
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < padded; ++i)
      out[static_cast<std::size_t>(ch) * padded + i] = xv[static_cast<std::size_t>(ch) * t + src[i]];
  return make_result(std::move(out), {c, rows, period}, {x},
                     [c, t, padded, src = std::move(src)](Node& self) {
                       auto g = pgrad(self, 0);
                       for (int ch = 0; ch < c; ++ch)
                         for (int i = 0; i < padded; ++i)
                           g[static_cast<std::size_t>(ch) * t + src[static_cast<std::size_t>(i)]] +=
                               self.grad[static_cast<std::size_t>(ch) * padded + i];
                     });
}

}  // namespace polyaccent::ops
