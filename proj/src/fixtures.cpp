// src/fixtures.cpp

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

#include "polyaccent/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "polyaccent/errors.hpp"

namespace polyaccent {

namespace fs = std::filesystem;

double fixture_resonance_hz(Accent accent) { return 500.0 + 350.0 * accent_index(accent); }

Waveform synth_harmonic(double f0_hz, double resonance_hz, double seconds, double amplitude,
                        double phase_seed) {
  if (!(f0_hz > 0) || !(seconds > 0)) throw InvalidArgument("synth_harmonic: f0 and duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(seconds * kSampleRate));
  const int harmonics = static_cast<int>(7000.0 / f0_hz);
  std::vector<double> gain(harmonics), phase(harmonics);
  double norm = 0;
  for (int h = 1; h <= harmonics; ++h) {
    const double f = h * f0_hz;
    const double d = (f - resonance_hz) / 250.0;
    gain[h - 1] = (0.2 + std::exp(-0.5 * d * d)) / h;
    phase[h - 1] = std::fmod(phase_seed * h * 1.618, 2 * std::numbers::pi);
    norm += gain[h - 1];
  }
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double s = 0;
    for (int h = 1; h <= harmonics; ++h)
      s += gain[h - 1] * std::sin(2 * std::numbers::pi * h * f0_hz * t + phase[h - 1]);
    w.samples[i] = amplitude * s / norm;
  }
  return w;
}

std::vector<ManifestEntry> make_fixture_corpus(const fs::path& dir, const FixtureSpec& spec) {
  if (spec.clips_per_accent <= 0 || spec.accents.empty() || spec.f0_hz.empty())
    throw InvalidArgument("make_fixture_corpus: empty specification");
  static const char* kWords[] = {"the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog",
                                 "please", "call", "stella", "ask", "her", "bring", "these"};
  fs::create_directories(dir / "wav");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> word(0, 14);
  std::uniform_real_distribution<double> phase(0.0, 100.0);
  std::vector<ManifestEntry> entries;
  int clip = 0;
  for (Accent a : spec.accents) {
    for (int k = 0; k < spec.clips_per_accent; ++k, ++clip) {
      const double f0 = spec.f0_hz[static_cast<std::size_t>(clip) % spec.f0_hz.size()];
      Waveform w = synth_harmonic(f0, fixture_resonance_hz(a), spec.seconds, spec.amplitude, phase(rng));
      ManifestEntry e;
      e.path = dir / "wav" / (std::string(accent_code(a)) + "_" + std::to_string(k) + ".wav");
      e.accent = a;
      e.subset = is_native(a) ? "LibriTTS" : "L2-Arctic";
      e.duration_s = w.seconds();
      // Keep the transcript within half the character frames so the
      // synthetic frontend can always lay it out.
      const std::size_t budget = static_cast<std::size_t>(frame_count(w.size(), kCharHopSamples)) / 2;
      for (int tries = 0; tries < 8; ++tries) {
        const std::string next = (e.text.empty() ? "" : e.text + " ") + kWords[word(rng)];
        if (next.size() <= budget) e.text = next;
      }
      write_wav(e.path, w);
      entries.push_back(std::move(e));
    }
  }
  std::vector<ManifestEntry> relative = entries;
  for (auto& e : relative) e.path = fs::relative(e.path, dir);
  write_manifest(dir / "manifest.jsonl", relative);
  return entries;
}

}  // namespace polyaccent
