// bench/bench_kernels.cpp

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

// Serial reference vs parallel kernels at shapes taken from the desk model.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "polyaccent/kernels.hpp"

namespace k = polyaccent::kernels;
using polyaccent::Scalar;

namespace {

std::vector<Scalar> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> d(-1, 1);
  std::vector<Scalar> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Generator stage-2 resblock conv: 32 channels, k7, dilation 3, 4480 samples.
k::Conv1dGeometry resblock_geometry() {
  k::Conv1dGeometry g;
  g.cin = g.cout = 32;
  g.kernel = 7;
  g.dilation = 3;
  g.t_in = g.t_out = 4480;
  g.pad_left = 9;
  return g;
}

template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto a = random_values(static_cast<std::size_t>(n) * n, 1), b = random_values(static_cast<std::size_t>(n) * n, 2);
  std::vector<Scalar> c(static_cast<std::size_t>(n) * n);
  for (auto _ : state) {
    if (Parallel)
      k::gemm(false, false, n, n, n, a.data(), b.data(), c.data(), false);
    else
      k::serial::gemm(false, false, n, n, n, a.data(), b.data(), c.data(), false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * n * n * n);
}

template <bool Parallel>
void BM_Conv1dForward(benchmark::State& state) {
  const auto g = resblock_geometry();
  auto in = random_values(static_cast<std::size_t>(g.cin) * g.t_in, 3);
  auto w = random_values(static_cast<std::size_t>(g.cout) * g.cin * g.kernel, 4);
  auto bias = random_values(static_cast<std::size_t>(g.cout), 5);
  std::vector<Scalar> out(static_cast<std::size_t>(g.cout) * g.t_out);
  for (auto _ : state) {
    if (Parallel)
      k::conv1d_forward(g, in.data(), w.data(), bias.data(), out.data());
    else
      k::serial::conv1d_forward(g, in.data(), w.data(), bias.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Conv1dBackward(benchmark::State& state) {
  const auto g = resblock_geometry();
  auto in = random_values(static_cast<std::size_t>(g.cin) * g.t_in, 3);
  auto w = random_values(static_cast<std::size_t>(g.cout) * g.cin * g.kernel, 4);
  auto go = random_values(static_cast<std::size_t>(g.cout) * g.t_out, 6);
  std::vector<Scalar> gi(in.size()), gw(w.size()), gb(static_cast<std::size_t>(g.cout));
  for (auto _ : state) {
    if (Parallel) {
      k::conv1d_backward_input(g, go.data(), w.data(), gi.data());
      k::conv1d_backward_params(g, go.data(), in.data(), gw.data(), gb.data());
    } else {
      k::serial::conv1d_backward_input(g, go.data(), w.data(), gi.data());
      k::serial::conv1d_backward_params(g, go.data(), in.data(), gw.data(), gb.data());
    }
    benchmark::DoNotOptimize(gw.data());
  }
}

// First upsampling stage: 128 -> 64 channels, k10 s5, 224 -> 1120 frames.
template <bool Parallel>
void BM_ConvTranspose(benchmark::State& state) {
  k::ConvTranspose1dGeometry g;
  g.cin = 128;
  g.cout = 64;
  g.kernel = 10;
  g.stride = 5;
  g.t_in = 224;
  g.t_out = 1120;
  g.crop_left = 2;
  auto in = random_values(static_cast<std::size_t>(g.cin) * g.t_in, 7);
  auto w = random_values(static_cast<std::size_t>(g.cin) * g.cout * g.kernel, 8);
  std::vector<Scalar> out(static_cast<std::size_t>(g.cout) * g.t_out);
  for (auto _ : state) {
    if (Parallel)
      k::conv_transpose1d_forward(g, in.data(), w.data(), nullptr, out.data());
    else
      k::serial::conv_transpose1d_forward(g, in.data(), w.data(), nullptr, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

// Mel analysis of one segment: 224 frames of 320 samples into 512-point spectra.
template <bool Parallel>
void BM_FrameSpectra(benchmark::State& state) {
  const int frames = 224, len = 320, n_fft = 512;
  auto x = random_values(static_cast<std::size_t>(frames) * len, 9);
  std::vector<std::complex<Scalar>> spec(static_cast<std::size_t>(frames) * (n_fft / 2 + 1));
  for (auto _ : state) {
    if (Parallel)
      k::frame_spectra(frames, len, n_fft, x.data(), spec.data());
    else
      k::serial::frame_spectra(frames, len, n_fft, x.data(), spec.data());
    benchmark::DoNotOptimize(spec.data());
  }
}

// Pitch analysis of one segment.
template <bool Parallel>
void BM_Nccf(benchmark::State& state) {
  const int frames = 224, window = 320, min_lag = 27, max_lag = 320;
  auto signal = random_values(static_cast<std::size_t>(frames * 80 + window + max_lag), 10);
  std::vector<int> starts(frames);
  for (int f = 0; f < frames; ++f) starts[static_cast<std::size_t>(f)] = f * 80;
  std::vector<Scalar> out(static_cast<std::size_t>(frames) * (max_lag - min_lag + 1));
  for (auto _ : state) {
    if (Parallel)
      k::nccf(frames, starts.data(), window, min_lag, max_lag, signal.data(), out.data());
    else
      k::serial::nccf(frames, starts.data(), window, min_lag, max_lag, signal.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Name("gemm/serial")->Arg(128)->Arg(256);
BENCHMARK(BM_Gemm<true>)->Name("gemm/parallel")->Arg(128)->Arg(256);
BENCHMARK(BM_Conv1dForward<false>)->Name("conv1d_forward/serial");
BENCHMARK(BM_Conv1dForward<true>)->Name("conv1d_forward/parallel");
BENCHMARK(BM_Conv1dBackward<false>)->Name("conv1d_backward/serial");
BENCHMARK(BM_Conv1dBackward<true>)->Name("conv1d_backward/parallel");
BENCHMARK(BM_ConvTranspose<false>)->Name("conv_transpose1d/serial");
BENCHMARK(BM_ConvTranspose<true>)->Name("conv_transpose1d/parallel");
BENCHMARK(BM_FrameSpectra<false>)->Name("frame_spectra/serial");
BENCHMARK(BM_FrameSpectra<true>)->Name("frame_spectra/parallel");
BENCHMARK(BM_Nccf<false>)->Name("nccf/serial");
BENCHMARK(BM_Nccf<true>)->Name("nccf/parallel");

BENCHMARK_MAIN();
