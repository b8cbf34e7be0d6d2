// include/polyaccent/frontend.hpp

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

#ifndef POLYACCENT_FRONTEND_HPP_
#define POLYACCENT_FRONTEND_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "polyaccent/audio.hpp"

namespace polyaccent {

// Character inventory of the recognizer. One symbol per entry; the blank is
// a distinguished entry. Text maps ' ' to the word-boundary symbol.
class CharVocab {
 public:
  // Letters a-z, apostrophe, word boundary '|', blank '_' (V = 29).
  CharVocab();
  // Each character of `spec` is one symbol. `blank` and `boundary` must be
  // members; symbols must be unique and V >= 2.
  CharVocab(const std::string& spec, char blank = '_', char boundary = '|');

  int size() const { return static_cast<int>(symbols_.size()); }
  int blank() const { return blank_; }
  int boundary() const { return boundary_; }
  char symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }
  const std::string& spec() const { return symbols_; }
  // -1 if absent.
  int index_of(char c) const;
  // Lower-cases, maps spaces to the boundary; InvalidArgument on symbols
  // outside the inventory.
  std::vector<int> encode(const std::string& text) const;

 private:
  std::string symbols_;
  int blank_ = 0;
  int boundary_ = 0;
};

// T_char x V, every row a distribution over the vocabulary, 320-sample hop.
struct CharPosteriorSequence {
  FrameMatrix frames;
  int hop_samples = kCharHopSamples;

  int rows() const { return frames.rows; }
  // Max |row sum - 1| and presence of negative entries.
  bool row_stochastic(double tol = 1e-5) const;
};

// Greedy CTC decoding: argmax per row, collapse repeats, drop blanks;
// boundary symbols become spaces.
std::string ctc_greedy_decode(const CharPosteriorSequence& seq, const CharVocab& vocab);

// Replaces every row by the one-hot of its argmax.
CharPosteriorSequence to_one_hot(const CharPosteriorSequence& seq);

// Rows [begin, begin + count); rows past the end are one-hot blanks.
CharPosteriorSequence slice_or_pad(const CharPosteriorSequence& seq, int begin, int count,
                                   const CharVocab& vocab);

// Deterministic stand-in for the recognizer. Characters are spread over the
// grid: each character gets a slot, the first half of the slot carries the
// character and the rest is blank. Adjacent repeated characters need at
// least one blank between them, so duration_frames must be at least
// len(text) plus the number of adjacent repeats. The target symbol gets 0.95
// mass, the rest is spread over other symbols by a seeded draw.
CharPosteriorSequence synthetic_predictions(const std::string& text, int duration_frames,
                                            const CharVocab& vocab, std::uint64_t seed);

CharPosteriorSequence load_cached_predictions(const std::filesystem::path& path,
                                              const CharVocab& vocab);
void save_cached_predictions(const std::filesystem::path& path,
                             const CharPosteriorSequence& seq);

// What a provider is asked about: a clip identity (cache key), its audio and
// optionally a transcript (used by the synthetic provider only).
struct ClipRequest {
  std::string id;
  const Waveform* wave = nullptr;
  std::string text;
};

class CharProvider {
 public:
  virtual ~CharProvider() = default;
  // Whole-clip predictions with ceil(n_samples / 320) rows.
  virtual CharPosteriorSequence predict(const ClipRequest& clip) const = 0;
  virtual const CharVocab& vocab() const = 0;
};

// Reads <cache_dir>/<id>.feat. Missing file -> FrontendUnavailable.
class CachedProvider : public CharProvider {
 public:
  CachedProvider(std::filesystem::path cache_dir, CharVocab vocab);
  CharPosteriorSequence predict(const ClipRequest& clip) const override;
  const CharVocab& vocab() const override { return vocab_; }
  std::filesystem::path path_for(const std::string& id) const;

 private:
  std::filesystem::path dir_;
  CharVocab vocab_;
};

class SyntheticProvider : public CharProvider {
 public:
  SyntheticProvider(CharVocab vocab, std::uint64_t seed);
  CharPosteriorSequence predict(const ClipRequest& clip) const override;
  const CharVocab& vocab() const override { return vocab_; }

 private:
  CharVocab vocab_;
  std::uint64_t seed_;
};

struct FrontendConfig {
  std::string kind = "synthetic";  // cached | synthetic
  std::filesystem::path cache_dir;
  std::string vocab = "_|'abcdefghijklmnopqrstuvwxyz";
  bool one_hot = false;
  std::uint64_t seed = 0;
};

std::unique_ptr<CharProvider> make_provider(const FrontendConfig& config);

// Stable 64-bit FNV-1a, used to derive per-clip seeds.
std::uint64_t fnv1a(const std::string& s);

}  // namespace polyaccent

#endif  // POLYACCENT_FRONTEND_HPP_
