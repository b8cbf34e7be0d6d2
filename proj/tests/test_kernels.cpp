// tests/test_kernels.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "polyaccent/kernels.hpp"

using namespace polyaccent;
namespace k = polyaccent::kernels;

namespace {

std::vector<Scalar> randvec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<Scalar> d(-1, 1);
  std::vector<Scalar> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

Scalar max_diff(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

k::Conv1dGeometry random_conv(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 5);
  k::Conv1dGeometry g;
  g.cin = small(rng);
  g.cout = small(rng);
  g.kernel = small(rng) + 1;
  g.stride = std::uniform_int_distribution<int>(1, 3)(rng);
  g.dilation = std::uniform_int_distribution<int>(1, 3)(rng);
  g.width = std::uniform_int_distribution<int>(1, 3)(rng);
  g.t_in = std::uniform_int_distribution<int>(20, 40)(rng);
  g.pad_left = std::uniform_int_distribution<int>(0, 4)(rng);
  const int pad_right = std::uniform_int_distribution<int>(0, 4)(rng);
  const int span = (g.kernel - 1) * g.dilation + 1;
  g.t_out = (g.t_in + g.pad_left + pad_right - span) / g.stride + 1;
  return g;
}

}  // namespace

TEST_CASE("gemm: parallel matches serial for every transpose combination") {
  std::mt19937_64 rng(1);
  for (int ta = 0; ta < 2; ++ta)
    for (int tb = 0; tb < 2; ++tb) {
      const int m = 7, n = 5, kk = 9;
      auto a = randvec(static_cast<std::size_t>(m) * kk, rng);
      auto b = randvec(static_cast<std::size_t>(kk) * n, rng);
      auto c0 = randvec(static_cast<std::size_t>(m) * n, rng);
      auto c1 = c0;
      k::gemm(ta, tb, m, n, kk, a.data(), b.data(), c0.data(), true);
      k::serial::gemm(ta, tb, m, n, kk, a.data(), b.data(), c1.data(), true);
      CHECK(max_diff(c0, c1) < 1e-12);
    }
}

TEST_CASE("conv1d: parallel matches serial on random geometries") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_conv(rng);
    auto in = randvec(static_cast<std::size_t>(g.cin) * g.t_in * g.width, rng);
    auto w = randvec(static_cast<std::size_t>(g.cout) * g.cin * g.kernel, rng);
    auto b = randvec(static_cast<std::size_t>(g.cout), rng);
    const std::size_t out_n = static_cast<std::size_t>(g.cout) * g.t_out * g.width;
    std::vector<Scalar> o1(out_n), o2(out_n);
    k::conv1d_forward(g, in.data(), w.data(), b.data(), o1.data());
    k::serial::conv1d_forward(g, in.data(), w.data(), b.data(), o2.data());
    CHECK(max_diff(o1, o2) < 1e-12);

    auto go = randvec(out_n, rng);
    std::vector<Scalar> gi1(in.size(), 0), gi2(in.size(), 0);
    k::conv1d_backward_input(g, go.data(), w.data(), gi1.data());
    k::serial::conv1d_backward_input(g, go.data(), w.data(), gi2.data());
    CHECK(max_diff(gi1, gi2) < 1e-12);

    std::vector<Scalar> gw1(w.size(), 0), gw2(w.size(), 0), gb1(b.size(), 0), gb2(b.size(), 0);
    k::conv1d_backward_params(g, go.data(), in.data(), gw1.data(), gb1.data());
    k::serial::conv1d_backward_params(g, go.data(), in.data(), gw2.data(), gb2.data());
    CHECK(max_diff(gw1, gw2) < 1e-12);
    CHECK(max_diff(gb1, gb2) < 1e-12);

    // Adjoint identity: <conv(x), y> == <x, conv^T(y)> (bias off).
    std::vector<Scalar> o3(out_n);
    k::conv1d_forward(g, in.data(), w.data(), nullptr, o3.data());
    CHECK(dot(o3, go) == doctest::Approx(dot(in, gi1)).epsilon(1e-10));
  }
}

TEST_CASE("conv_transpose1d: parallel matches serial and is the adjoint of a strided conv") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    k::ConvTranspose1dGeometry g;
    g.cin = std::uniform_int_distribution<int>(1, 4)(rng);
    g.cout = std::uniform_int_distribution<int>(1, 4)(rng);
    g.stride = std::uniform_int_distribution<int>(1, 5)(rng);
    g.kernel = g.stride * std::uniform_int_distribution<int>(1, 3)(rng);
    g.crop_left = (g.kernel - g.stride) / 2;
    g.t_in = std::uniform_int_distribution<int>(3, 12)(rng);
    g.t_out = g.t_in * g.stride;
    auto in = randvec(static_cast<std::size_t>(g.cin) * g.t_in, rng);
    auto w = randvec(static_cast<std::size_t>(g.cin) * g.cout * g.kernel, rng);
    auto b = randvec(static_cast<std::size_t>(g.cout), rng);
    const std::size_t out_n = static_cast<std::size_t>(g.cout) * g.t_out;
    std::vector<Scalar> o1(out_n), o2(out_n);
    k::conv_transpose1d_forward(g, in.data(), w.data(), b.data(), o1.data());
    k::serial::conv_transpose1d_forward(g, in.data(), w.data(), b.data(), o2.data());
    CHECK(max_diff(o1, o2) < 1e-12);

    auto go = randvec(out_n, rng);
    std::vector<Scalar> gi1(in.size(), 0), gi2(in.size(), 0);
    k::conv_transpose1d_backward_input(g, go.data(), w.data(), gi1.data());
    k::serial::conv_transpose1d_backward_input(g, go.data(), w.data(), gi2.data());
    CHECK(max_diff(gi1, gi2) < 1e-12);
    std::vector<Scalar> gw1(w.size(), 0), gw2(w.size(), 0), gb1(b.size(), 0), gb2(b.size(), 0);
    k::conv_transpose1d_backward_params(g, go.data(), in.data(), gw1.data(), gb1.data());
    k::serial::conv_transpose1d_backward_params(g, go.data(), in.data(), gw2.data(), gb2.data());
    CHECK(max_diff(gw1, gw2) < 1e-12);
    CHECK(max_diff(gb1, gb2) < 1e-12);

    std::vector<Scalar> o3(out_n);
    k::conv_transpose1d_forward(g, in.data(), w.data(), nullptr, o3.data());
    CHECK(dot(o3, go) == doctest::Approx(dot(in, gi1)).epsilon(1e-10));
  }
}

TEST_CASE("frame_spectra: FFT path matches the direct DFT, adjoint holds") {
  std::mt19937_64 rng(4);
  const int frames = 3, len = 40, n_fft = 64, bins = n_fft / 2 + 1;
  auto x = randvec(static_cast<std::size_t>(frames) * len, rng);
  std::vector<std::complex<Scalar>> s1(static_cast<std::size_t>(frames) * bins),
      s2(s1.size());
  k::frame_spectra(frames, len, n_fft, x.data(), s1.data());
  k::serial::frame_spectra(frames, len, n_fft, x.data(), s2.data());
  Scalar m = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) m = std::max(m, std::abs(s1[i] - s2[i]));
  CHECK(m < 1e-9);

  std::vector<std::complex<Scalar>> gs(s1.size());
  for (auto& g : gs) g = {randvec(1, rng)[0], randvec(1, rng)[0]};
  std::vector<Scalar> ga(x.size(), 0), gb(x.size(), 0);
  k::frame_spectra_adjoint(frames, len, n_fft, gs.data(), ga.data());
  k::serial::frame_spectra_adjoint(frames, len, n_fft, gs.data(), gb.data());
  CHECK(max_diff(ga, gb) < 1e-9);
  // <Re/Im(F x), g> == <x, F^T g>
  Scalar lhs = 0;
  for (std::size_t i = 0; i < s1.size(); ++i)
    lhs += s1[i].real() * gs[i].real() + s1[i].imag() * gs[i].imag();
  CHECK(lhs == doctest::Approx(dot(x, ga)).epsilon(1e-9));
}

TEST_CASE("nccf: running-energy kernel matches the direct reference") {
  std::mt19937_64 rng(5);
  const int window = 64, min_lag = 5, max_lag = 50, frames = 6;
  auto sig = randvec(600, rng);
  std::vector<int> starts{0, 40, 80, 200, 300, 450};
  const int lags = max_lag - min_lag + 1;
  std::vector<Scalar> a(static_cast<std::size_t>(frames) * lags), b(a.size());
  k::nccf(frames, starts.data(), window, min_lag, max_lag, sig.data(), a.data());
  k::serial::nccf(frames, starts.data(), window, min_lag, max_lag, sig.data(), b.data());
  CHECK(max_diff(a, b) < 1e-9);
}

TEST_CASE("nccf: a sine correlates perfectly at its period") {
  const int period = 40;
  std::vector<Scalar> sig(1000);
  for (std::size_t n = 0; n < sig.size(); ++n)
    sig[n] = std::sin(2 * std::numbers::pi * static_cast<double>(n) / period);
  int start = 100;
  std::vector<Scalar> out(61);
  k::nccf(1, &start, 200, 20, 80, sig.data(), out.data());
  CHECK(out[period - 20] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(out[period / 2 - 20] == doctest::Approx(-1.0).epsilon(1e-9));
}
