// polyaccent/audio.hpp

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

#ifndef POLYACCENT_AUDIO_HPP_
#define POLYACCENT_AUDIO_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "polyaccent/tensor.hpp"

namespace polyaccent {

inline constexpr int kSampleRate = 16000;
inline constexpr int kHopSamples = 80;        // 5 ms
inline constexpr int kWindowSamples = 320;    // 20 ms
inline constexpr int kCharHopSamples = 320;   // 20 ms recognizer grid
inline constexpr int kSegmentSamples = 17920; // 1.12 s
inline constexpr int kCharUpsample = kCharHopSamples / kHopSamples;

struct Waveform {
  std::vector<Scalar> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Row-major [rows x cols] feature matrix.
struct FrameMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Scalar> data;

  FrameMatrix() = default;
  FrameMatrix(int r, int c, Scalar fill = 0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  Scalar& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  Scalar at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::span<const Scalar> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  Tensor to_tensor() const { return Tensor::from(data, {rows, cols}); }
  static FrameMatrix from_tensor(const Tensor& t);
  bool operator==(const FrameMatrix&) const = default;
};

// 16-bit PCM RIFF/WAVE. Multi-channel input is averaged to mono and
// amplitudes are divided by 32768.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& wave);

// Band-limited (windowed-sinc) sample-rate conversion. Output length is
// round(n * target / source); equal rates return the input unchanged.
Waveform resample(const Waveform& wave, int target_rate);

// Splits a 16 kHz waveform into seg_seconds pieces. A trailing remainder is
// zero-padded to a full segment when at least half of it is filled and
// dropped otherwise.
std::vector<Waveform> segment(const Waveform& wave, double seg_seconds = 1.12);

// Repeats every row `factor` times: [a, b] -> [a, a, a, a, b, b, b, b].
FrameMatrix upsample_frames(const FrameMatrix& seq, int factor = kCharUpsample);

// Number of frames on a centered hop grid: ceil(num_samples / hop).
int frame_count(std::size_t num_samples, int hop);

}  // namespace polyaccent

#endif  // POLYACCENT_AUDIO_HPP_
