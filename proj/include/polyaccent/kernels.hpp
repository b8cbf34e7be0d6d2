// polyaccent/kernels.hpp

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

#ifndef POLYACCENT_KERNELS_HPP_
#define POLYACCENT_KERNELS_HPP_

#include <complex>
#include <vector>

#include "polyaccent/tensor.hpp"

// Data-parallel inner loops behind the differentiable ops. Every kernel in
// the top namespace is OpenMP-parallel over an output axis, so each output
// element is produced by one thread with a fixed summation order and results
// do not depend on the thread count. The `serial` namespace holds direct
// loop-nest references with identical signatures; tests compare the two and
// bench/ times them.
namespace polyaccent::kernels {

// Layout: input [cin][t_in][width], weight [cout][cin][k],
// output [cout][t_out][width]. width > 1 runs the same 1-D filter over
// independent columns (a (k, 1) 2-D convolution).
struct Conv1dGeometry {
  int cin = 0;
  int cout = 0;
  int kernel = 0;
  int t_in = 0;
  int t_out = 0;
  int width = 1;
  int stride = 1;
  int dilation = 1;
  int pad_left = 0;  // zero padding; input index = t*stride + k*dilation - pad_left
};

// Layout: input [cin][t_in], weight [cin][cout][k], output [cout][t_out].
// Output index = t*stride + k - crop_left, kept when inside [0, t_out).
struct ConvTranspose1dGeometry {
  int cin = 0;
  int cout = 0;
  int kernel = 0;
  int t_in = 0;
  int t_out = 0;
  int stride = 1;
  int crop_left = 0;
};

// C[m x n] (+)= op(A) * op(B); op(A) is m x k, op(B) is k x n.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, const Scalar* a,
          const Scalar* b, Scalar* c, bool accumulate);

void conv1d_forward(const Conv1dGeometry& g, const Scalar* in,
                    const Scalar* weight, const Scalar* bias, Scalar* out);
// grad_in += d/d(in)
void conv1d_backward_input(const Conv1dGeometry& g, const Scalar* grad_out,
                           const Scalar* weight, Scalar* grad_in);
// grad_weight += ..., grad_bias += ... (grad_bias may be null)
void conv1d_backward_params(const Conv1dGeometry& g, const Scalar* grad_out,
                            const Scalar* in, Scalar* grad_weight,
                            Scalar* grad_bias);

void conv_transpose1d_forward(const ConvTranspose1dGeometry& g,
                              const Scalar* in, const Scalar* weight,
                              const Scalar* bias, Scalar* out);
void conv_transpose1d_backward_input(const ConvTranspose1dGeometry& g,
                                     const Scalar* grad_out,
                                     const Scalar* weight, Scalar* grad_in);
void conv_transpose1d_backward_params(const ConvTranspose1dGeometry& g,
                                      const Scalar* grad_out, const Scalar* in,
                                      Scalar* grad_weight, Scalar* grad_bias);

// Half-spectrum DFT of windowed frames. frames is [n_frames][frame_len],
// spectra receives [n_frames][n_fft/2 + 1]; frame_len <= n_fft, zero-filled.
void frame_spectra(int n_frames, int frame_len, int n_fft, const Scalar* frames,
                   std::complex<Scalar>* spectra);
// Adjoint of frame_spectra. grad_spectra[f][k] packs dL/dRe + i dL/dIm of
// bin k; grad_frames[f][n] += Re(sum_k grad_spectra[f][k] e^{+2 pi i k n / n_fft}).
void frame_spectra_adjoint(int n_frames, int frame_len, int n_fft,
                           const std::complex<Scalar>* grad_spectra,
                           Scalar* grad_frames);

// Normalized cross-correlation between signal[start, start+window) and the
// same span shifted by each lag in [min_lag, max_lag]. starts has n_frames
// entries; signal must cover start + window + max_lag for every frame.
// out is [n_frames][max_lag - min_lag + 1].
void nccf(int n_frames, const int* starts, int window, int min_lag, int max_lag,
          const Scalar* signal, Scalar* out);

namespace serial {

void gemm(bool trans_a, bool trans_b, int m, int n, int k, const Scalar* a,
          const Scalar* b, Scalar* c, bool accumulate);
void conv1d_forward(const Conv1dGeometry& g, const Scalar* in,
                    const Scalar* weight, const Scalar* bias, Scalar* out);
void conv1d_backward_input(const Conv1dGeometry& g, const Scalar* grad_out,
                           const Scalar* weight, Scalar* grad_in);
void conv1d_backward_params(const Conv1dGeometry& g, const Scalar* grad_out,
                            const Scalar* in, Scalar* grad_weight,
                            Scalar* grad_bias);
void conv_transpose1d_forward(const ConvTranspose1dGeometry& g,
                              const Scalar* in, const Scalar* weight,
                              const Scalar* bias, Scalar* out);
void conv_transpose1d_backward_input(const ConvTranspose1dGeometry& g,
                                     const Scalar* grad_out,
                                     const Scalar* weight, Scalar* grad_in);
void conv_transpose1d_backward_params(const ConvTranspose1dGeometry& g,
                                      const Scalar* grad_out, const Scalar* in,
                                      Scalar* grad_weight, Scalar* grad_bias);
// Direct O(n_fft^2) DFT.
void frame_spectra(int n_frames, int frame_len, int n_fft, const Scalar* frames,
                   std::complex<Scalar>* spectra);
void frame_spectra_adjoint(int n_frames, int frame_len, int n_fft,
                           const std::complex<Scalar>* grad_spectra,
                           Scalar* grad_frames);
void nccf(int n_frames, const int* starts, int window, int min_lag, int max_lag,
          const Scalar* signal, Scalar* out);

}  // namespace serial

// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace polyaccent::kernels

#endif  // POLYACCENT_KERNELS_HPP_
