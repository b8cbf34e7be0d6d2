// src/kernels.cpp

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

#include "polyaccent/kernels.hpp"

#include <cblas.h>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polyaccent::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// First and one-past-last t with lo <= t*stride + offset < hi.
inline void valid_range(int offset, int stride, int t_count, int lo, int hi,
                        int* t_begin, int* t_end) {
  // smallest t with t*stride + offset >= lo
  int need = lo - offset;
  int b = need <= 0 ? 0 : (need + stride - 1) / stride;
  // largest t with t*stride + offset <= hi - 1
  int top = hi - 1 - offset;
  int e = top < 0 ? 0 : top / stride + 1;
  *t_begin = std::max(0, b);
  *t_end = std::min(t_count, e);
  if (*t_end < *t_begin) *t_end = *t_begin;
}

}  // namespace

// ---------------------------------------------------------------- gemm

void gemm(bool trans_a, bool trans_b, int m, int n, int k, const Scalar* a,
          const Scalar* b, Scalar* c, bool accumulate) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (!accumulate) std::fill(c, c + static_cast<std::size_t>(m) * n, Scalar(0));
    return;
  }
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, 1.0, a, trans_a ? m : k, b,
              trans_b ? k : n, accumulate ? 1.0 : 0.0, c, n);
}

// ---------------------------------------------------------------- conv1d

namespace {

// col[(ci * k + kk)][t * width + c] = in[ci][t * stride + kk * dilation - pad][c]
void im2col(const Conv1dGeometry& g, const Scalar* in, Scalar* col) {
  const std::size_t in_plane = static_cast<std::size_t>(g.t_in) * g.width;
  const std::size_t out_plane = static_cast<std::size_t>(g.t_out) * g.width;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < g.cin * g.kernel; ++row) {
    const int ci = row / g.kernel, kk = row % g.kernel;
    const Scalar* irow = in + ci * in_plane;
    Scalar* crow = col + static_cast<std::size_t>(row) * out_plane;
    const int offset = kk * g.dilation - g.pad_left;
    int tb, te;
    valid_range(offset, g.stride, g.t_out, 0, g.t_in, &tb, &te);
    tb = std::clamp(tb, 0, g.t_out);
    te = std::clamp(te, tb, g.t_out);
    std::fill(crow, crow + static_cast<std::size_t>(tb) * g.width, Scalar(0));
    if (te > tb) {
      if (g.stride == 1) {
        std::copy_n(irow + static_cast<std::size_t>(tb + offset) * g.width,
                    static_cast<std::size_t>(te - tb) * g.width,
                    crow + static_cast<std::size_t>(tb) * g.width);
      } else {
        for (int t = tb; t < te; ++t)
          std::copy_n(irow + static_cast<std::size_t>(t * g.stride + offset) * g.width, g.width,
                      crow + static_cast<std::size_t>(t) * g.width);
      }
    }
    std::fill(crow + static_cast<std::size_t>(te) * g.width, crow + out_plane, Scalar(0));
  }
}

// Adjoint of im2col: accumulates col back into grad_in. Parallel over input
// channels, each of which owns a disjoint slice of grad_in.
void col2im(const Conv1dGeometry& g, const Scalar* col, Scalar* grad_in) {
  const std::size_t in_plane = static_cast<std::size_t>(g.t_in) * g.width;
  const std::size_t out_plane = static_cast<std::size_t>(g.t_out) * g.width;
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < g.cin; ++ci) {
    Scalar* girow = grad_in + ci * in_plane;
    for (int kk = 0; kk < g.kernel; ++kk) {
      const Scalar* crow = col + (static_cast<std::size_t>(ci) * g.kernel + kk) * out_plane;
      const int offset = kk * g.dilation - g.pad_left;
      int tb, te;
      valid_range(offset, g.stride, g.t_out, 0, g.t_in, &tb, &te);
      for (int t = tb; t < te; ++t) {
        Scalar* dst = girow + static_cast<std::size_t>(t * g.stride + offset) * g.width;
        const Scalar* src = crow + static_cast<std::size_t>(t) * g.width;
        for (int c = 0; c < g.width; ++c) dst[c] += src[c];
      }
    }
  }
}

}  // namespace

void conv1d_forward(const Conv1dGeometry& g, const Scalar* in,
                    const Scalar* weight, const Scalar* bias, Scalar* out) {
  const int n = g.t_out * g.width;
  const int kdim = g.cin * g.kernel;
  std::vector<Scalar> col(static_cast<std::size_t>(kdim) * n);
  im2col(g, in, col.data());
  for (int co = 0; co < g.cout; ++co)
    std::fill(out + static_cast<std::size_t>(co) * n, out + static_cast<std::size_t>(co + 1) * n,
              bias ? bias[co] : Scalar(0));
  gemm(false, false, g.cout, n, kdim, weight, col.data(), out, true);
}

void conv1d_backward_input(const Conv1dGeometry& g, const Scalar* grad_out,
                           const Scalar* weight, Scalar* grad_in) {
  const int n = g.t_out * g.width;
  const int kdim = g.cin * g.kernel;
  std::vector<Scalar> col(static_cast<std::size_t>(kdim) * n);
  gemm(true, false, kdim, n, g.cout, weight, grad_out, col.data(), false);
  col2im(g, col.data(), grad_in);
}

void conv1d_backward_params(const Conv1dGeometry& g, const Scalar* grad_out,
                            const Scalar* in, Scalar* grad_weight,
                            Scalar* grad_bias) {
  const int n = g.t_out * g.width;
  const int kdim = g.cin * g.kernel;
  if (grad_bias) {
#pragma omp parallel for schedule(static)
    for (int co = 0; co < g.cout; ++co) {
      const Scalar* gorow = grad_out + static_cast<std::size_t>(co) * n;
      Scalar acc = 0;
      for (int i = 0; i < n; ++i) acc += gorow[i];
      grad_bias[co] += acc;
    }
  }
  std::vector<Scalar> col(static_cast<std::size_t>(kdim) * n);
  im2col(g, in, col.data());
  gemm(false, true, g.cout, kdim, n, grad_out, col.data(), grad_weight, true);
}

// ------------------------------------------------------ conv transpose 1d

void conv_transpose1d_forward(const ConvTranspose1dGeometry& g,
                              const Scalar* in, const Scalar* weight,
                              const Scalar* bias, Scalar* out) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < g.cout; ++co) {
    Scalar* orow = out + static_cast<std::size_t>(co) * g.t_out;
    std::fill(orow, orow + g.t_out, bias ? bias[co] : Scalar(0));
    for (int ci = 0; ci < g.cin; ++ci) {
      const Scalar* irow = in + static_cast<std::size_t>(ci) * g.t_in;
      const Scalar* wrow = weight + (static_cast<std::size_t>(ci) * g.cout + co) * g.kernel;
      for (int kk = 0; kk < g.kernel; ++kk) {
        const Scalar w = wrow[kk];
        const int offset = kk - g.crop_left;
        int tb, te;
        valid_range(offset, g.stride, g.t_in, 0, g.t_out, &tb, &te);
        Scalar* dst = orow + offset;
        for (int t = tb; t < te; ++t) dst[t * g.stride] += w * irow[t];
      }
    }
  }
}

void conv_transpose1d_backward_input(const ConvTranspose1dGeometry& g,
                                     const Scalar* grad_out,
                                     const Scalar* weight, Scalar* grad_in) {
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < g.cin; ++ci) {
    Scalar* girow = grad_in + static_cast<std::size_t>(ci) * g.t_in;
    for (int co = 0; co < g.cout; ++co) {
      const Scalar* gorow = grad_out + static_cast<std::size_t>(co) * g.t_out;
      const Scalar* wrow = weight + (static_cast<std::size_t>(ci) * g.cout + co) * g.kernel;
      for (int kk = 0; kk < g.kernel; ++kk) {
        const Scalar w = wrow[kk];
        const int offset = kk - g.crop_left;
        int tb, te;
        valid_range(offset, g.stride, g.t_in, 0, g.t_out, &tb, &te);
        const Scalar* src = gorow + offset;
        for (int t = tb; t < te; ++t) girow[t] += w * src[t * g.stride];
      }
    }
  }
}

void conv_transpose1d_backward_params(const ConvTranspose1dGeometry& g,
                                      const Scalar* grad_out, const Scalar* in,
                                      Scalar* grad_weight, Scalar* grad_bias) {
  if (grad_bias) {
    for (int co = 0; co < g.cout; ++co) {
      const Scalar* gorow = grad_out + static_cast<std::size_t>(co) * g.t_out;
      Scalar acc = 0;
      for (int t = 0; t < g.t_out; ++t) acc += gorow[t];
      grad_bias[co] += acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < g.cin; ++ci) {
    const Scalar* irow = in + static_cast<std::size_t>(ci) * g.t_in;
    for (int co = 0; co < g.cout; ++co) {
      const Scalar* gorow = grad_out + static_cast<std::size_t>(co) * g.t_out;
      Scalar* gw = grad_weight + (static_cast<std::size_t>(ci) * g.cout + co) * g.kernel;
      for (int kk = 0; kk < g.kernel; ++kk) {
        const int offset = kk - g.crop_left;
        int tb, te;
        valid_range(offset, g.stride, g.t_in, 0, g.t_out, &tb, &te);
        const Scalar* src = gorow + offset;
        Scalar acc = 0;
        for (int t = tb; t < te; ++t) acc += irow[t] * src[t * g.stride];
        gw[kk] += acc;
      }
    }
  }
}

// ---------------------------------------------------------------- spectra

namespace {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

const FftPlans& plans_for(int n_fft) {
  static std::mutex mu;
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n_fft);
  if (it != cache.end()) return it->second;
  std::vector<double> real(static_cast<std::size_t>(n_fft));
  std::vector<fftw_complex> cplx(static_cast<std::size_t>(n_fft / 2 + 1));
  FftPlans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_1d(n_fft, real.data(), cplx.data(), flags);
  p.inverse = fftw_plan_dft_c2r_1d(n_fft, cplx.data(), real.data(), flags);
  return cache.emplace(n_fft, p).first->second;
}

}  // namespace

static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));

void frame_spectra(int n_frames, int frame_len, int n_fft, const Scalar* frames,
                   std::complex<Scalar>* spectra) {
  const FftPlans& p = plans_for(n_fft);
  const int bins = n_fft / 2 + 1;
#pragma omp parallel
  {
    std::vector<double> buf(static_cast<std::size_t>(n_fft), 0.0);
#pragma omp for schedule(static)
    for (int f = 0; f < n_frames; ++f) {
      const Scalar* src = frames + static_cast<std::size_t>(f) * frame_len;
      std::copy(src, src + frame_len, buf.begin());
      std::fill(buf.begin() + frame_len, buf.end(), 0.0);
      fftw_execute_dft_r2c(
          p.forward, buf.data(),
          reinterpret_cast<fftw_complex*>(spectra + static_cast<std::size_t>(f) * bins));
    }
  }
}

void frame_spectra_adjoint(int n_frames, int frame_len, int n_fft,
                           const std::complex<Scalar>* grad_spectra,
                           Scalar* grad_frames) {
  const FftPlans& p = plans_for(n_fft);
  const int bins = n_fft / 2 + 1;
#pragma omp parallel
  {
    std::vector<std::complex<double>> half(static_cast<std::size_t>(bins));
    std::vector<double> out(static_cast<std::size_t>(n_fft));
#pragma omp for schedule(static)
    for (int f = 0; f < n_frames; ++f) {
      const std::complex<Scalar>* g = grad_spectra + static_cast<std::size_t>(f) * bins;
      // c2r doubles interior bins (Hermitian completion); halve them first.
      for (int k = 0; k < bins; ++k) {
        const bool edge = (k == 0) || (2 * k == n_fft);
        half[static_cast<std::size_t>(k)] = edge ? g[k] : g[k] * 0.5;
      }
      fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(half.data()),
                           out.data());
      Scalar* dst = grad_frames + static_cast<std::size_t>(f) * frame_len;
      for (int n = 0; n < frame_len; ++n) dst[n] += out[static_cast<std::size_t>(n)];
    }
  }
}

// ---------------------------------------------------------------- nccf

namespace {

Scalar nccf_one(const Scalar* x, int window, int lag) {
  Scalar cross = 0, e0 = 0, e1 = 0;
  for (int n = 0; n < window; ++n) {
    cross += x[n] * x[n + lag];
    e0 += x[n] * x[n];
    e1 += x[n + lag] * x[n + lag];
  }
  const Scalar denom = std::sqrt(e0 * e1);
  return denom > Scalar(1e-20) ? cross / denom : Scalar(0);
}

}  // namespace

void nccf(int n_frames, const int* starts, int window, int min_lag, int max_lag,
          const Scalar* signal, Scalar* out) {
  const int n_lags = max_lag - min_lag + 1;
#pragma omp parallel for schedule(static)
  for (int f = 0; f < n_frames; ++f) {
    const Scalar* x = signal + starts[f];
    Scalar* row = out + static_cast<std::size_t>(f) * n_lags;
    // Running energy of the lagged span avoids an O(window) pass per lag.
    Scalar e0 = 0, e1 = 0;
    for (int n = 0; n < window; ++n) {
      e0 += x[n] * x[n];
      e1 += x[n + min_lag] * x[n + min_lag];
    }
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (lag > min_lag) {
        const Scalar leaving = x[lag - 1];
        const Scalar entering = x[lag + window - 1];
        e1 += entering * entering - leaving * leaving;
        if (e1 < 0) e1 = 0;
      }
      Scalar cross = 0;
#pragma omp simd reduction(+ : cross)
      for (int n = 0; n < window; ++n) cross += x[n] * x[n + lag];
      const Scalar denom = std::sqrt(e0 * e1);
      row[lag - min_lag] = denom > Scalar(1e-20) ? cross / denom : Scalar(0);
    }
  }
}

// =============================================================== serial

namespace serial {

void gemm(bool trans_a, bool trans_b, int m, int n, int k, const Scalar* a,
          const Scalar* b, Scalar* c, bool accumulate) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar acc = 0;
      for (int p = 0; p < k; ++p) {
        const Scalar av = trans_a ? a[p * m + i] : a[i * k + p];
        const Scalar bv = trans_b ? b[j * k + p] : b[p * n + j];
        acc += av * bv;
      }
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
}

void conv1d_forward(const Conv1dGeometry& g, const Scalar* in,
                    const Scalar* weight, const Scalar* bias, Scalar* out) {
  for (int co = 0; co < g.cout; ++co)
    for (int t = 0; t < g.t_out; ++t)
      for (int c = 0; c < g.width; ++c) {
        Scalar acc = bias ? bias[co] : Scalar(0);
        for (int ci = 0; ci < g.cin; ++ci)
          for (int kk = 0; kk < g.kernel; ++kk) {
            const int src = t * g.stride + kk * g.dilation - g.pad_left;
            if (src < 0 || src >= g.t_in) continue;
            acc += weight[(co * g.cin + ci) * g.kernel + kk] *
                   in[(ci * g.t_in + src) * g.width + c];
          }
        out[(co * g.t_out + t) * g.width + c] = acc;
      }
}

void conv1d_backward_input(const Conv1dGeometry& g, const Scalar* grad_out,
                           const Scalar* weight, Scalar* grad_in) {
  for (int co = 0; co < g.cout; ++co)
    for (int t = 0; t < g.t_out; ++t)
      for (int c = 0; c < g.width; ++c)
        for (int ci = 0; ci < g.cin; ++ci)
          for (int kk = 0; kk < g.kernel; ++kk) {
            const int src = t * g.stride + kk * g.dilation - g.pad_left;
            if (src < 0 || src >= g.t_in) continue;
            grad_in[(ci * g.t_in + src) * g.width + c] +=
                weight[(co * g.cin + ci) * g.kernel + kk] *
                grad_out[(co * g.t_out + t) * g.width + c];
          }
}

void conv1d_backward_params(const Conv1dGeometry& g, const Scalar* grad_out,
                            const Scalar* in, Scalar* grad_weight,
                            Scalar* grad_bias) {
  for (int co = 0; co < g.cout; ++co)
    for (int t = 0; t < g.t_out; ++t)
      for (int c = 0; c < g.width; ++c) {
        const Scalar go = grad_out[(co * g.t_out + t) * g.width + c];
        if (grad_bias) grad_bias[co] += go;
        for (int ci = 0; ci < g.cin; ++ci)
          for (int kk = 0; kk < g.kernel; ++kk) {
            const int src = t * g.stride + kk * g.dilation - g.pad_left;
            if (src < 0 || src >= g.t_in) continue;
            grad_weight[(co * g.cin + ci) * g.kernel + kk] +=
                go * in[(ci * g.t_in + src) * g.width + c];
          }
      }
}

void conv_transpose1d_forward(const ConvTranspose1dGeometry& g,
                              const Scalar* in, const Scalar* weight,
                              const Scalar* bias, Scalar* out) {
  for (int co = 0; co < g.cout; ++co)
    for (int t = 0; t < g.t_out; ++t) out[co * g.t_out + t] = bias ? bias[co] : 0;
  for (int ci = 0; ci < g.cin; ++ci)
    for (int t = 0; t < g.t_in; ++t)
      for (int co = 0; co < g.cout; ++co)
        for (int kk = 0; kk < g.kernel; ++kk) {
          const int dst = t * g.stride + kk - g.crop_left;
          if (dst < 0 || dst >= g.t_out) continue;
          out[co * g.t_out + dst] +=
              in[ci * g.t_in + t] * weight[(ci * g.cout + co) * g.kernel + kk];
        }
}

void conv_transpose1d_backward_input(const ConvTranspose1dGeometry& g,
                                     const Scalar* grad_out,
                                     const Scalar* weight, Scalar* grad_in) {
  for (int ci = 0; ci < g.cin; ++ci)
    for (int t = 0; t < g.t_in; ++t)
      for (int co = 0; co < g.cout; ++co)
        for (int kk = 0; kk < g.kernel; ++kk) {
          const int dst = t * g.stride + kk - g.crop_left;
          if (dst < 0 || dst >= g.t_out) continue;
          grad_in[ci * g.t_in + t] +=
              grad_out[co * g.t_out + dst] * weight[(ci * g.cout + co) * g.kernel + kk];
        }
}

void conv_transpose1d_backward_params(const ConvTranspose1dGeometry& g,
                                      const Scalar* grad_out, const Scalar* in,
                                      Scalar* grad_weight, Scalar* grad_bias) {
  if (grad_bias)
    for (int co = 0; co < g.cout; ++co)
      for (int t = 0; t < g.t_out; ++t) grad_bias[co] += grad_out[co * g.t_out + t];
  for (int ci = 0; ci < g.cin; ++ci)
    for (int t = 0; t < g.t_in; ++t)
      for (int co = 0; co < g.cout; ++co)
        for (int kk = 0; kk < g.kernel; ++kk) {
          const int dst = t * g.stride + kk - g.crop_left;
          if (dst < 0 || dst >= g.t_out) continue;
          grad_weight[(ci * g.cout + co) * g.kernel + kk] +=
              in[ci * g.t_in + t] * grad_out[co * g.t_out + dst];
        }
}

void frame_spectra(int n_frames, int frame_len, int n_fft, const Scalar* frames,
                   std::complex<Scalar>* spectra) {
  const int bins = n_fft / 2 + 1;
  for (int f = 0; f < n_frames; ++f)
    for (int kb = 0; kb < bins; ++kb) {
      Scalar re = 0, im = 0;
      for (int n = 0; n < frame_len; ++n) {
        const Scalar theta = 2 * std::numbers::pi * kb * n / n_fft;
        const Scalar x = frames[f * frame_len + n];
        re += x * std::cos(theta);
        im -= x * std::sin(theta);
      }
      spectra[f * bins + kb] = {re, im};
    }
}

void frame_spectra_adjoint(int n_frames, int frame_len, int n_fft,
                           const std::complex<Scalar>* grad_spectra,
                           Scalar* grad_frames) {
  const int bins = n_fft / 2 + 1;
  for (int f = 0; f < n_frames; ++f)
    for (int n = 0; n < frame_len; ++n) {
      Scalar acc = 0;
      for (int kb = 0; kb < bins; ++kb) {
        const Scalar theta = 2 * std::numbers::pi * kb * n / n_fft;
        const std::complex<Scalar> gk = grad_spectra[f * bins + kb];
        acc += gk.real() * std::cos(theta) - gk.imag() * std::sin(theta);
      }
      grad_frames[f * frame_len + n] += acc;
    }
}

void nccf(int n_frames, const int* starts, int window, int min_lag, int max_lag,
          const Scalar* signal, Scalar* out) {
  const int n_lags = max_lag - min_lag + 1;
  for (int f = 0; f < n_frames; ++f)
    for (int lag = min_lag; lag <= max_lag; ++lag)
      out[f * n_lags + (lag - min_lag)] = nccf_one(signal + starts[f], window, lag);
}

}  // namespace serial

}  // namespace polyaccent::kernels
