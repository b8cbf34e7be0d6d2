// src/features.cpp

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

#include "polyaccent/features.hpp"

#include <algorithm>
#include <complex>
#include <cstring>
#include <tuple>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "polyaccent/errors.hpp"
#include "polyaccent/kernels.hpp"

namespace polyaccent {

// ------------------------------------------------------------ mel

namespace {

double hz_to_mel(double hz) {
  const double f_sp = 200.0 / 3;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) return hz / f_sp;
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz(double mel) {
  const double f_sp = 200.0 / 3;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) return mel * f_sp;
  return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

// Index into [0, n) for a possibly out-of-range position, mirroring about the
// end samples without repeating them.
int reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<int>(i < n ? i : period - i);
}

std::vector<Scalar> periodic_hann(int n) {
  std::vector<Scalar> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / n);
  return w;
}

struct MelTables {
  std::vector<Scalar> window;
  // Sparse rows: per mel bin, the first FFT bin and its weights.
  std::vector<int> first_bin;
  std::vector<std::vector<Scalar>> weights;
};

const MelTables& tables_for(const MelConfig& c) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, double, double, int>, MelTables> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(c.n_fft, c.window, c.n_mels, c.fmin, c.fmax, c.sample_rate);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  MelTables t;
  t.window = periodic_hann(c.window);
  for (const auto& row : mel_filterbank(c)) {
    int first = 0;
    while (first < static_cast<int>(row.size()) && row[static_cast<std::size_t>(first)] == 0) ++first;
    int last = static_cast<int>(row.size()) - 1;
    while (last > first && row[static_cast<std::size_t>(last)] == 0) --last;
    t.first_bin.push_back(first);
    t.weights.emplace_back(row.begin() + first, row.begin() + last + 1);
  }
  return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace

std::vector<std::vector<Scalar>> mel_filterbank(const MelConfig& c) {
  const int bins = c.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(c.fmin), mel_hi = hz_to_mel(c.fmax);
  std::vector<double> edges(static_cast<std::size_t>(c.n_mels + 2));
  for (int i = 0; i < c.n_mels + 2; ++i)
    edges[static_cast<std::size_t>(i)] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (c.n_mels + 1));
  std::vector<std::vector<Scalar>> fb(static_cast<std::size_t>(c.n_mels),
                                      std::vector<Scalar>(static_cast<std::size_t>(bins), 0));
  for (int m = 0; m < c.n_mels; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)], mid = edges[static_cast<std::size_t>(m + 1)],
                 hi = edges[static_cast<std::size_t>(m + 2)];
    const double enorm = 2.0 / (hi - lo);
    for (int b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * c.sample_rate / c.n_fft;
      const double up = (f - lo) / (mid - lo);
      const double down = (hi - f) / (hi - mid);
      fb[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)] =
          std::max(0.0, std::min(up, down)) * enorm;
    }
  }
  return fb;
}

Tensor log_mel_spectrogram(const Tensor& wave, const MelConfig& c) {
  if (!(wave.rank() == 1 || (wave.rank() == 2 && wave.dim(0) == 1)))
    throw ShapeError("log_mel_spectrogram expects [n] or [1, n], got " + shape_str(wave.shape()));
  if (c.window > c.n_fft) throw InvalidArgument("mel window longer than FFT");
  const MelTables& tab = tables_for(c);
  const auto n = static_cast<long long>(wave.numel());
  const int frames = frame_count(static_cast<std::size_t>(n), c.hop);
  const int bins = c.n_fft / 2 + 1;
  if (frames == 0)
    return detail::make_result({}, {0, c.n_mels}, {wave}, [](detail::Node&) {});

  // Sample index feeding each (frame, tap).
  std::vector<int> src(static_cast<std::size_t>(frames) * c.window);
  for (int f = 0; f < frames; ++f) {
    const long long start = static_cast<long long>(f) * c.hop + c.hop / 2 - c.window / 2;
    for (int k = 0; k < c.window; ++k)
      src[static_cast<std::size_t>(f) * c.window + k] = reflect_index(start + k, n);
  }
  auto xv = wave.values();
  std::vector<Scalar> windowed(src.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    windowed[i] = xv[static_cast<std::size_t>(src[i])] * tab.window[i % static_cast<std::size_t>(c.window)];

  std::vector<std::complex<Scalar>> spec(static_cast<std::size_t>(frames) * bins);
  kernels::frame_spectra(frames, c.window, c.n_fft, windowed.data(), spec.data());
  std::vector<Scalar> mag(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec[i]);

  std::vector<Scalar> energy(static_cast<std::size_t>(frames) * c.n_mels);
  std::vector<Scalar> out(energy.size());
  for (int f = 0; f < frames; ++f)
    for (int m = 0; m < c.n_mels; ++m) {
      const auto& w = tab.weights[static_cast<std::size_t>(m)];
      const Scalar* mrow = mag.data() + static_cast<std::size_t>(f) * bins + tab.first_bin[static_cast<std::size_t>(m)];
      Scalar acc = 0;
      for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * mrow[j];
      const std::size_t idx = static_cast<std::size_t>(f) * c.n_mels + m;
      energy[idx] = acc;
      out[idx] = std::log(std::max(acc, c.floor));
    }

  return detail::make_result(
      std::move(out), {frames, c.n_mels}, {wave},
      [c, frames, bins, src = std::move(src), spec = std::move(spec), mag = std::move(mag),
       energy = std::move(energy)](detail::Node& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        const MelTables& tab = tables_for(c);
        std::vector<std::complex<Scalar>> gspec(spec.size());
        std::vector<Scalar> gmag(static_cast<std::size_t>(bins));
        for (int f = 0; f < frames; ++f) {
          std::fill(gmag.begin(), gmag.end(), 0);
          for (int m = 0; m < c.n_mels; ++m) {
            const std::size_t idx = static_cast<std::size_t>(f) * c.n_mels + m;
            if (energy[idx] <= c.floor) continue;  // clamped: no gradient
            const Scalar g = self.grad[idx] / energy[idx];
            const auto& w = tab.weights[static_cast<std::size_t>(m)];
            const int first = tab.first_bin[static_cast<std::size_t>(m)];
            for (std::size_t j = 0; j < w.size(); ++j) gmag[static_cast<std::size_t>(first) + j] += g * w[j];
          }
          for (int b = 0; b < bins; ++b) {
            const std::size_t i = static_cast<std::size_t>(f) * bins + b;
            if (mag[i] > 0) gspec[i] = gmag[static_cast<std::size_t>(b)] * spec[i] / mag[i];
          }
        }
        std::vector<Scalar> gframes(src.size(), 0);
        kernels::frame_spectra_adjoint(frames, c.window, c.n_fft, gspec.data(), gframes.data());
        auto g = parent.grad_buffer();
        for (std::size_t i = 0; i < src.size(); ++i)
          g[static_cast<std::size_t>(src[i])] += gframes[i] * tab.window[i % static_cast<std::size_t>(c.window)];
      });
}

MelSpectrogram mel_spectrogram(const Waveform& wave, const MelConfig& config) {
  NoGradGuard guard;
  Tensor t = Tensor::from(wave.samples, {static_cast<int>(wave.size())});
  MelSpectrogram out;
  out.hop = config.hop;
  out.frames = FrameMatrix::from_tensor(log_mel_spectrogram(t, config));
  return out;
}

FrameMatrix mfcc(const MelSpectrogram& mel, int n_mfcc) {
  const int m = mel.frames.cols;
  if (n_mfcc < 1 || n_mfcc > m) throw InvalidArgument("n_mfcc out of range");
  FrameMatrix out(mel.frames.rows, n_mfcc);
  std::vector<Scalar> basis(static_cast<std::size_t>(n_mfcc) * m);
  for (int k = 0; k < n_mfcc; ++k) {
    const Scalar s = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int j = 0; j < m; ++j)
      basis[static_cast<std::size_t>(k) * m + j] = s * std::cos(std::numbers::pi * k * (j + 0.5) / m);
  }
  kernels::gemm(false, true, mel.frames.rows, n_mfcc, m, mel.frames.data.data(), basis.data(),
                out.data.data(), false);
  return out;
}

// ------------------------------------------------------------ pitch

namespace {

struct Candidate {
  double lag = 0;   // fractional samples; 0 marks the unvoiced state
  double score = 0; // NCCF peak value
};

}  // namespace

PitchTrack extract_pitch(const Waveform& wave, const PitchConfig& c) {
  if (wave.size() < static_cast<std::size_t>(c.window))
    throw InvalidArgument("extract_pitch: need at least " + std::to_string(c.window) +
                          " samples, got " + std::to_string(wave.size()));
  const int frames = frame_count(wave.size(), c.hop);
  const int min_lag = static_cast<int>(std::ceil(c.sample_rate / c.f0_max));
  const int max_lag = static_cast<int>(std::floor(c.sample_rate / c.f0_min));
  const int n_lags = max_lag - min_lag + 1;

  // Zero-padded copy so every analysis span [start, start + window + max_lag]
  // is addressable.
  const int left = c.window / 2;
  const int right = c.window + max_lag + c.hop;
  std::vector<Scalar> padded(static_cast<std::size_t>(left) + wave.size() + right, 0);
  std::copy(wave.samples.begin(), wave.samples.end(), padded.begin() + left);
  std::vector<int> starts(static_cast<std::size_t>(frames));
  std::vector<double> rms(static_cast<std::size_t>(frames));
  double max_rms = 0;
  for (int f = 0; f < frames; ++f) {
    const int start = f * c.hop + c.hop / 2 - c.window / 2 + left;
    starts[static_cast<std::size_t>(f)] = start;
    double e = 0;
    for (int k = 0; k < c.window; ++k) e += padded[static_cast<std::size_t>(start + k)] * padded[static_cast<std::size_t>(start + k)];
    rms[static_cast<std::size_t>(f)] = std::sqrt(e / c.window);
    max_rms = std::max(max_rms, rms[static_cast<std::size_t>(f)]);
  }
  std::vector<Scalar> corr(static_cast<std::size_t>(frames) * n_lags);
  kernels::nccf(frames, starts.data(), c.window, min_lag, max_lag, padded.data(), corr.data());

  const double energy_gate = std::max(c.energy_floor, c.relative_energy * max_rms);
  std::vector<std::vector<Candidate>> cands(static_cast<std::size_t>(frames));
  std::vector<std::vector<double>> local(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    auto& fc = cands[static_cast<std::size_t>(f)];
    fc.push_back({0, 0});
    const bool loud = rms[static_cast<std::size_t>(f)] >= energy_gate;
    if (loud) {
      const Scalar* r = corr.data() + static_cast<std::size_t>(f) * n_lags;
      std::vector<Candidate> peaks;
      for (int i = 1; i + 1 < n_lags; ++i) {
        if (r[i] < 0.3 || r[i] < r[i - 1] || r[i] < r[i + 1]) continue;
        // Parabolic refinement of the peak position and height.
        const double a = r[i - 1], b = r[i], d = r[i + 1];
        const double denom = a - 2 * b + d;
        double shift = denom < 0 ? 0.5 * (a - d) / denom : 0;
        shift = std::clamp(shift, -0.5, 0.5);
        const double height = std::min(1.0, b - 0.25 * (a - d) * shift);
        peaks.push_back({min_lag + i + shift, height});
      }
      // Rank by local cost so near-integer multiples of a short period do
      // not crowd the true period out of the candidate list.
      auto rank = [&](const Candidate& x) { return x.score - c.octave_cost * x.lag / max_lag; };
      std::sort(peaks.begin(), peaks.end(),
                [&](const Candidate& x, const Candidate& y) { return rank(x) > rank(y); });
      if (peaks.size() > static_cast<std::size_t>(c.max_candidates))
        peaks.resize(static_cast<std::size_t>(c.max_candidates));
      fc.insert(fc.end(), peaks.begin(), peaks.end());
    }
    auto& lc = local[static_cast<std::size_t>(f)];
    lc.resize(fc.size());
    lc[0] = loud ? 1 - c.voicing_threshold : 0.0;
    for (std::size_t j = 1; j < fc.size(); ++j)
      lc[j] = (1 - fc[j].score) + c.octave_cost * fc[j].lag / max_lag;
  }

  // Viterbi over candidates.
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(frames));
  std::vector<std::vector<int>> back(static_cast<std::size_t>(frames));
  cost[0] = local[0];
  back[0].assign(cands[0].size(), -1);
  auto transition = [&](const Candidate& a, const Candidate& b) {
    const bool va = a.lag > 0, vb = b.lag > 0;
    if (va && vb) return c.jump_cost * std::abs(std::log(a.lag / b.lag));
    if (va != vb) return c.voicing_switch_cost;
    return 0.0;
  };
  for (int f = 1; f < frames; ++f) {
    const auto& prev = cands[static_cast<std::size_t>(f - 1)];
    const auto& cur = cands[static_cast<std::size_t>(f)];
    auto& cc = cost[static_cast<std::size_t>(f)];
    auto& bb = back[static_cast<std::size_t>(f)];
    cc.assign(cur.size(), std::numeric_limits<double>::infinity());
    bb.assign(cur.size(), 0);
    for (std::size_t j = 0; j < cur.size(); ++j)
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const double v = cost[static_cast<std::size_t>(f - 1)][i] + transition(prev[i], cur[j]);
        if (v < cc[j]) {
          cc[j] = v;
          bb[j] = static_cast<int>(i);
        }
      }
    for (std::size_t j = 0; j < cur.size(); ++j) cc[j] += local[static_cast<std::size_t>(f)][j];
  }

  PitchTrack track;
  track.f0_hz.assign(static_cast<std::size_t>(frames), 0);
  track.voiced.assign(static_cast<std::size_t>(frames), false);
  track.periodicity.assign(static_cast<std::size_t>(frames), 0);
  const auto& last = cost[static_cast<std::size_t>(frames - 1)];
  int state = static_cast<int>(std::min_element(last.begin(), last.end()) - last.begin());
  for (int f = frames - 1; f >= 0; --f) {
    const Candidate& cand = cands[static_cast<std::size_t>(f)][static_cast<std::size_t>(state)];
    if (cand.lag > 0) {
      track.voiced[static_cast<std::size_t>(f)] = true;
      track.f0_hz[static_cast<std::size_t>(f)] = std::clamp(c.sample_rate / cand.lag, c.f0_min, c.f0_max);
      track.periodicity[static_cast<std::size_t>(f)] = std::clamp(cand.score, 0.0, 1.0);
    }
    state = back[static_cast<std::size_t>(f)][static_cast<std::size_t>(state)];
  }
  return track;
}

FrameMatrix acoustic_frames(const Waveform& wave, const PitchTrack& pitch,
                            const AcousticFrameConfig& config) {
  MelSpectrogram mel = mel_spectrogram(wave, config.mel);
  FrameMatrix cep = mfcc(mel, config.n_mfcc);
  if (cep.rows != pitch.frames())
    throw ConsistencyError("acoustic_frames: MFCC grid has " + std::to_string(cep.rows) +
                           " frames but pitch track has " + std::to_string(pitch.frames()));
  FrameMatrix out(cep.rows, config.n_mfcc + 1);
  for (int r = 0; r < cep.rows; ++r) {
    for (int k = 0; k < config.n_mfcc; ++k) out.at(r, k) = cep.at(r, k);
    out.at(r, config.n_mfcc) = pitch.periodicity[static_cast<std::size_t>(r)];
  }
  return out;
}

// ------------------------------------------------------------ dump

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_feature_dump(const std::filesystem::path& path, const FeatureDump& dump) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorruptFileError("cannot write " + path.string());
  put_u32(out, kFeatureDumpVersion);
  put_u32(out, static_cast<std::uint32_t>(dump.frames.rows));
  put_u32(out, static_cast<std::uint32_t>(dump.frames.cols));
  put_u32(out, static_cast<std::uint32_t>(dump.hop_samples));
  for (Scalar v : dump.frames.data) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
  if (!out) throw CorruptFileError("write failed: " + path.string());
}

FeatureDump read_feature_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptFileError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw CorruptFileError(path.string() + ": missing feature header");
  const std::uint32_t version = get_u32(bytes.data());
  if (version != kFeatureDumpVersion)
    throw FormatError(path.string() + ": feature dump version " + std::to_string(version));
  const std::uint64_t rows = get_u32(bytes.data() + 4);
  const std::uint64_t cols = get_u32(bytes.data() + 8);
  const std::uint32_t hop = get_u32(bytes.data() + 12);
  if (bytes.size() - 16 != rows * cols * 4)
    throw CorruptFileError(path.string() + ": payload holds " + std::to_string(bytes.size() - 16) +
                           " bytes, header promises " + std::to_string(rows * cols * 4));
  FeatureDump dump;
  dump.hop_samples = static_cast<int>(hop);
  dump.frames = FrameMatrix(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < dump.frames.data.size(); ++i) {
    const std::uint32_t bits = get_u32(bytes.data() + 16 + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    dump.frames.data[i] = f;
  }
  return dump;
}

}  // namespace polyaccent
