// src/audio.cpp

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

#include "polyaccent/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "polyaccent/errors.hpp"

namespace polyaccent {

FrameMatrix FrameMatrix::from_tensor(const Tensor& t) {
  if (t.rank() != 2) throw ShapeError("FrameMatrix needs a rank-2 tensor");
  FrameMatrix m(t.dim(0), t.dim(1));
  std::copy(t.values().begin(), t.values().end(), m.data.begin());
  return m;
}

int frame_count(std::size_t num_samples, int hop) {
  return static_cast<int>((num_samples + static_cast<std::size_t>(hop) - 1) /
                          static_cast<std::size_t>(hop));
}

// ------------------------------------------------------------------ WAV

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void put16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptFileError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw CorruptFileError(name + ": not a RIFF/WAVE file");

  int channels = 0, rate = 0, bits = 0, format = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || avail < 16) throw CorruptFileError(name + ": short fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = static_cast<int>(le32(chunk + 12));
      bits = le16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min<std::size_t>(len, avail);
    }
    pos = body + len + (len & 1);
  }
  if (format == 0) throw CorruptFileError(name + ": missing fmt chunk");
  if (data == nullptr) throw CorruptFileError(name + ": missing data chunk");
  // 0xFFFE (extensible) is accepted when the sample layout is plain 16-bit PCM.
  if ((format != 1 && format != 0xFFFE) || bits != 16)
    throw FormatError(name + ": only 16-bit PCM WAV is supported");
  if (channels < 1 || rate <= 0) throw CorruptFileError(name + ": bad fmt fields");

  const std::size_t frames = data_len / (2 * static_cast<std::size_t>(channels));
  Waveform wave;
  wave.sample_rate = rate;
  wave.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    Scalar acc = 0;
    for (int c = 0; c < channels; ++c) {
      const unsigned char* s = data + 2 * (i * static_cast<std::size_t>(channels) + c);
      acc += static_cast<std::int16_t>(le16(s));
    }
    wave.samples[i] = acc / channels / 32768.0;
  }
  return wave;
}

void write_wav(const std::filesystem::path& path, const Waveform& wave) {
  if (wave.sample_rate <= 0) throw InvalidArgument("write_wav: non-positive rate");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorruptFileError("cannot write " + path.string());
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  out.write("RIFF", 4);
  put32(out, 36 + 2 * n);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(wave.sample_rate));
  put32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.write("data", 4);
  put32(out, 2 * n);
  for (Scalar s : wave.samples) {
    const double scaled = std::round((std::isfinite(s) ? s : 0.0) * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(q));
  }
  if (!out) throw CorruptFileError("write failed: " + path.string());
}

// ------------------------------------------------------------- resample

Waveform resample(const Waveform& wave, int target_rate) {
  if (wave.sample_rate <= 0 || target_rate <= 0)
    throw InvalidArgument("resample: sample rates must be positive");
  for (Scalar s : wave.samples)
    if (!std::isfinite(s)) throw InvalidArgument("resample: non-finite sample");
  if (wave.sample_rate == target_rate) return wave;
  Waveform out;
  out.sample_rate = target_rate;
  if (wave.empty()) return out;

  const long long src = wave.sample_rate, dst = target_rate;
  const auto n_in = static_cast<long long>(wave.size());
  const long long n_out = (n_in * dst + src / 2) / src;
  out.samples.resize(static_cast<std::size_t>(n_out));

  // Lowpass at 0.95 of the lower Nyquist, Hann-windowed over 32 zero crossings
  // of the filter (measured in input samples).
  const double cutoff = 0.95 * std::min(1.0, static_cast<double>(dst) / src);
  const double half_width = 16.0 / cutoff;
  const double step = static_cast<double>(src) / dst;
  const Scalar* x = wave.samples.data();
#pragma omp parallel for schedule(static)
  for (long long n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n) * step;
    const long long lo = std::max(0LL, static_cast<long long>(std::ceil(t - half_width)));
    const long long hi = std::min(n_in - 1, static_cast<long long>(std::floor(t + half_width)));
    double acc = 0;
    for (long long k = lo; k <= hi; ++k) {
      const double d = t - static_cast<double>(k);
      const double arg = std::numbers::pi * cutoff * d;
      const double sinc = std::abs(d) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      const double win = 0.5 + 0.5 * std::cos(std::numbers::pi * d / half_width);
      acc += x[k] * cutoff * sinc * win;
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

// ------------------------------------------------------------- segment

std::vector<Waveform> segment(const Waveform& wave, double seg_seconds) {
  if (seg_seconds <= 0) throw InvalidArgument("segment length must be positive");
  const auto seg_len = static_cast<std::size_t>(std::llround(seg_seconds * wave.sample_rate));
  std::vector<Waveform> out;
  if (seg_len == 0) return out;
  const std::size_t full = wave.size() / seg_len;
  const std::size_t rest = wave.size() % seg_len;
  for (std::size_t s = 0; s < full; ++s) {
    Waveform piece;
    piece.sample_rate = wave.sample_rate;
    piece.samples.assign(wave.samples.begin() + static_cast<std::ptrdiff_t>(s * seg_len),
                         wave.samples.begin() + static_cast<std::ptrdiff_t>((s + 1) * seg_len));
    out.push_back(std::move(piece));
  }
  if (rest > 0 && 2 * rest >= seg_len) {
    Waveform piece;
    piece.sample_rate = wave.sample_rate;
    piece.samples.assign(wave.samples.end() - static_cast<std::ptrdiff_t>(rest), wave.samples.end());
    piece.samples.resize(seg_len, 0.0);
    out.push_back(std::move(piece));
  }
  return out;
}

FrameMatrix upsample_frames(const FrameMatrix& seq, int factor) {
  if (factor < 1) throw InvalidArgument("upsample factor must be >= 1");
  FrameMatrix out(seq.rows * factor, seq.cols);
  for (int r = 0; r < seq.rows; ++r) {
    auto src = seq.row(r);
    for (int f = 0; f < factor; ++f)
      std::copy(src.begin(), src.end(),
                out.data.begin() + static_cast<std::ptrdiff_t>(r * factor + f) * seq.cols);
  }
  return out;
}

}  // namespace polyaccent
