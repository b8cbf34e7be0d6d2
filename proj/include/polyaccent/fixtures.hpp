// include/polyaccent/fixtures.hpp

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

#ifndef POLYACCENT_FIXTURES_HPP_
#define POLYACCENT_FIXTURES_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polyaccent/accent.hpp"
#include "polyaccent/audio.hpp"
#include "polyaccent/training.hpp"

namespace polyaccent {

// Harmonic test signals: each clip is a sum of harmonics of f0 under a
// spectral envelope with one resonance whose centre depends on the accent.
struct FixtureSpec {
  int clips_per_accent = 2;
  double seconds = 0.5;
  std::vector<Accent> accents{Accent::AM, Accent::AR, Accent::BR, Accent::HI,
                              Accent::KO, Accent::MA, Accent::SP, Accent::VI};
  std::vector<double> f0_hz{200, 400};  // cycled over clips
  double amplitude = 0.3;
  std::uint64_t seed = 7;
};

// Resonance centre (Hz) used for an accent.
double fixture_resonance_hz(Accent accent);

Waveform synth_harmonic(double f0_hz, double resonance_hz, double seconds, double amplitude,
                        double phase_seed);

// Writes <dir>/wav/<accent>_<k>.wav and <dir>/manifest.jsonl; native clips go
// to subset "LibriTTS", the rest to "L2-Arctic". Returns the entries.
std::vector<ManifestEntry> make_fixture_corpus(const std::filesystem::path& dir,
                                               const FixtureSpec& spec = {});

}  // namespace polyaccent

#endif  // POLYACCENT_FIXTURES_HPP_
