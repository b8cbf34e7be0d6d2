// polyaccent/features.hpp

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

#ifndef POLYACCENT_FEATURES_HPP_
#define POLYACCENT_FEATURES_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "polyaccent/audio.hpp"
#include "polyaccent/tensor.hpp"

namespace polyaccent {

struct MelConfig {
  int n_fft = 512;
  int window = kWindowSamples;
  int hop = kHopSamples;
  int n_mels = 80;
  double fmin = 0;
  double fmax = 8000;
  double floor = 1e-5;  // log compression clamps energies below this
  int sample_rate = kSampleRate;
};

struct MelSpectrogram {
  FrameMatrix frames;  // [t_mel, n_mels], natural-log magnitudes
  int hop = kHopSamples;
};

// Slaney-style mel filterbank, [n_mels][n_fft / 2 + 1].
std::vector<std::vector<Scalar>> mel_filterbank(const MelConfig& config);

// Differentiable log-mel spectrogram of a 1-D waveform tensor ([n] or [1, n]).
// Frames are centered on each hop block with reflect padding at the edges, so
// the result is [ceil(n / hop), n_mels].
Tensor log_mel_spectrogram(const Tensor& wave, const MelConfig& config = {});

MelSpectrogram mel_spectrogram(const Waveform& wave, const MelConfig& config = {});

// Type-II orthonormal DCT of each log-mel row, keeping the first n_mfcc terms.
FrameMatrix mfcc(const MelSpectrogram& mel, int n_mfcc = 13);

struct PitchConfig {
  double f0_min = 50;
  double f0_max = 600;
  int window = kWindowSamples;
  int hop = kHopSamples;
  int sample_rate = kSampleRate;
  double voicing_threshold = 0.45;  // NCCF peak needed to prefer "voiced"
  double octave_cost = 0.05;        // per unit of lag / max_lag
  double jump_cost = 0.5;           // per unit |log lag ratio| between frames
  double voicing_switch_cost = 0.2;
  double energy_floor = 1e-4;       // absolute frame RMS below which unvoiced
  double relative_energy = 0.03;    // fraction of the loudest frame's RMS
  int max_candidates = 6;
};

struct PitchTrack {
  std::vector<double> f0_hz;        // 0 where unvoiced
  std::vector<bool> voiced;
  std::vector<double> periodicity;  // NCCF at the chosen lag, 0 if unvoiced

  int frames() const { return static_cast<int>(f0_hz.size()); }
};

// Autocorrelation pitch tracker with a dynamic-programming smoothness pass.
// Throws InvalidArgument for inputs shorter than one analysis window.
PitchTrack extract_pitch(const Waveform& wave, const PitchConfig& config = {});

struct AcousticFrameConfig {
  MelConfig mel;
  int n_mfcc = 13;
};

// [t_ac, n_mfcc + 1]: MFCCs followed by the pitch tracker's periodicity.
// Throws ConsistencyError if the two grids disagree.
FrameMatrix acoustic_frames(const Waveform& wave, const PitchTrack& pitch,
                            const AcousticFrameConfig& config = {});

// Feature dump: 4 little-endian uint32 {version, n_frames, n_dims,
// hop_samples} then n_frames * n_dims float32 values, row-major.
inline constexpr std::uint32_t kFeatureDumpVersion = 1;

struct FeatureDump {
  FrameMatrix frames;
  int hop_samples = kHopSamples;
};

void write_feature_dump(const std::filesystem::path& path, const FeatureDump& dump);
FeatureDump read_feature_dump(const std::filesystem::path& path);

}  // namespace polyaccent

#endif  // POLYACCENT_FEATURES_HPP_
