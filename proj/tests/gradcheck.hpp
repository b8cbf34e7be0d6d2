// tests/gradcheck.hpp

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

#ifndef POLYACCENT_TESTS_GRADCHECK_HPP_
#define POLYACCENT_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "polyaccent/tensor.hpp"

namespace polyaccent::testing {

struct GradCheckReport {
  double max_rel_error = 0;
  double max_abs_error = 0;
  int checked = 0;
};

// Relative error with a floor so that two near-zero gradients compare equal.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// Compares backprop gradients of loss() against central differences on up to
// per_tensor randomly chosen entries of each tensor in params.
inline GradCheckReport check_gradients(const std::function<Tensor()>& loss,
                                       std::vector<Tensor> params, double step,
                                       int per_tensor, unsigned seed = 7,
                                       double floor = 1e-6) {
  for (auto& p : params) p.zero_grad();
  loss().backward();
  std::mt19937 rng(seed);
  GradCheckReport report;
  for (auto& p : params) {
    std::vector<std::size_t> idx(p.numel());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    if (per_tensor > 0 && idx.size() > static_cast<std::size_t>(per_tensor))
      idx.resize(static_cast<std::size_t>(per_tensor));
    std::vector<Scalar> analytic(p.grad().begin(), p.grad().end());
    if (analytic.empty()) analytic.assign(p.numel(), 0);
    for (std::size_t i : idx) {
      Scalar& v = p.mutable_values()[i];
      const Scalar saved = v;
      double plus, minus;
      {
        NoGradGuard guard;
        v = saved + step;
        plus = loss().item();
        v = saved - step;
        minus = loss().item();
      }
      v = saved;
      const double numeric = (plus - minus) / (2 * step);
      const double rel = relative_error(analytic[i], numeric, floor);
      if (std::getenv("POLYACCENT_GRADCHECK_VERBOSE") && rel > 1e-4)
        std::fprintf(stderr, "gradcheck: tensor %s entry %zu analytic %.9g numeric %.9g\n",
                     shape_str(p.shape()).c_str(), i, analytic[i], numeric);
      report.max_rel_error = std::max(report.max_rel_error, rel);
      report.max_abs_error = std::max(report.max_abs_error, std::abs(analytic[i] - numeric));
      ++report.checked;
    }
  }
  return report;
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0,
                            bool requires_grad = true) {
  Tensor t = Tensor::zeros(std::move(shape), requires_grad);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (auto& v : t.mutable_values()) v = dist(rng);
  return t;
}

}  // namespace polyaccent::testing

#endif  // POLYACCENT_TESTS_GRADCHECK_HPP_
