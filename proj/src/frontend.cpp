// src/frontend.cpp

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

#include "polyaccent/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "polyaccent/errors.hpp"
#include "polyaccent/features.hpp"

namespace polyaccent {

CharVocab::CharVocab() : CharVocab("_|'abcdefghijklmnopqrstuvwxyz") {}

CharVocab::CharVocab(const std::string& spec, char blank, char boundary) : symbols_(spec) {
  if (spec.size() < 2) throw InvalidArgument("CharVocab: need at least 2 symbols");
  std::set<char> seen(spec.begin(), spec.end());
  if (seen.size() != spec.size()) throw InvalidArgument("CharVocab: duplicate symbol in '" + spec + "'");
  blank_ = index_of(blank);
  boundary_ = index_of(boundary);
  if (blank_ < 0) throw InvalidArgument("CharVocab: blank symbol missing");
  if (boundary_ < 0) throw InvalidArgument("CharVocab: word-boundary symbol missing");
}

int CharVocab::index_of(char c) const {
  auto pos = symbols_.find(c);
  return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

std::vector<int> CharVocab::encode(const std::string& text) const {
  std::vector<int> out;
  out.reserve(text.size());
  for (char raw : text) {
    if (raw == ' ') {
      out.push_back(boundary_);
      continue;
    }
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    const int i = index_of(c);
    if (i < 0 || i == blank_)
      throw InvalidArgument(std::string("CharVocab: symbol '") + raw + "' not in vocabulary");
    out.push_back(i);
  }
  return out;
}

bool CharPosteriorSequence::row_stochastic(double tol) const {
  for (int r = 0; r < frames.rows; ++r) {
    double s = 0;
    for (int c = 0; c < frames.cols; ++c) {
      const double v = frames.at(r, c);
      if (!(v >= 0)) return false;
      s += v;
    }
    if (std::abs(s - 1) > tol) return false;
  }
  return true;
}

namespace {

int row_argmax(const FrameMatrix& m, int r) {
  int best = 0;
  for (int c = 1; c < m.cols; ++c)
    if (m.at(r, c) > m.at(r, best)) best = c;
  return best;
}

FrameMatrix blank_rows(int rows, const CharVocab& vocab) {
  FrameMatrix m(rows, vocab.size());
  for (int r = 0; r < rows; ++r) m.at(r, vocab.blank()) = 1;
  return m;
}

}  // namespace

std::string ctc_greedy_decode(const CharPosteriorSequence& seq, const CharVocab& vocab) {
  std::string out;
  int prev = -1;
  for (int r = 0; r < seq.frames.rows; ++r) {
    const int k = row_argmax(seq.frames, r);
    if (k != prev && k != vocab.blank()) out.push_back(k == vocab.boundary() ? ' ' : vocab.symbol(k));
    prev = k;
  }
  return out;
}

CharPosteriorSequence to_one_hot(const CharPosteriorSequence& seq) {
  CharPosteriorSequence out{FrameMatrix(seq.frames.rows, seq.frames.cols), seq.hop_samples};
  for (int r = 0; r < seq.frames.rows; ++r) out.frames.at(r, row_argmax(seq.frames, r)) = 1;
  return out;
}

CharPosteriorSequence slice_or_pad(const CharPosteriorSequence& seq, int begin, int count,
                                   const CharVocab& vocab) {
  if (begin < 0 || count < 0) throw InvalidArgument("slice_or_pad: negative range");
  if (seq.frames.cols != vocab.size())
    throw ShapeError("slice_or_pad: sequence has " + std::to_string(seq.frames.cols) +
                     " columns, vocabulary has " + std::to_string(vocab.size()));
  CharPosteriorSequence out{blank_rows(count, vocab), seq.hop_samples};
  const int avail = std::clamp(seq.frames.rows - begin, 0, count);
  const auto w = static_cast<std::size_t>(seq.frames.cols);
  std::copy_n(seq.frames.data.begin() + static_cast<std::ptrdiff_t>(begin * w),
              static_cast<std::size_t>(avail) * w, out.frames.data.begin());
  return out;
}

CharPosteriorSequence synthetic_predictions(const std::string& text, int duration_frames,
                                            const CharVocab& vocab, std::uint64_t seed) {
  if (duration_frames < 0) throw InvalidArgument("synthetic_predictions: negative duration");
  const std::vector<int> ids = vocab.encode(text);
  const int n = static_cast<int>(ids.size());
  // Minimum slot sizes: one frame per character, plus a separating blank
  // before a repeat.
  std::vector<int> slot(static_cast<std::size_t>(n));
  int needed = 0;
  for (int i = 0; i < n; ++i) {
    const bool repeat_next = i + 1 < n && ids[static_cast<std::size_t>(i)] == ids[static_cast<std::size_t>(i + 1)];
    slot[static_cast<std::size_t>(i)] = repeat_next ? 2 : 1;
    needed += slot[static_cast<std::size_t>(i)];
  }
  if (duration_frames < needed)
    throw InvalidArgument("synthetic_predictions: " + std::to_string(duration_frames) +
                          " frames cannot hold '" + text + "' (need " + std::to_string(needed) + ")");
  const int extra = duration_frames - needed;
  std::vector<int> target(static_cast<std::size_t>(duration_frames), vocab.blank());
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const int len = slot[ui] + (i + 1) * extra / n - i * extra / n;
    const int chars = std::max(1, (len + 1) / 2);
    std::fill_n(target.begin() + pos, std::min(chars, len), ids[ui]);
    pos += len;
  }

  const int v = vocab.size();
  CharPosteriorSequence out{FrameMatrix(duration_frames, v), kCharHopSamples};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(v));
  for (int r = 0; r < duration_frames; ++r) {
    const int t = target[static_cast<std::size_t>(r)];
    double total = 0;
    for (int c = 0; c < v; ++c) {
      w[static_cast<std::size_t>(c)] = c == t ? 0 : unit(rng);
      total += w[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < v; ++c)
      out.frames.at(r, c) = c == t ? 0.95 : 0.05 * w[static_cast<std::size_t>(c)] / total;
  }
  return out;
}

CharPosteriorSequence load_cached_predictions(const std::filesystem::path& path,
                                              const CharVocab& vocab) {
  FeatureDump dump = read_feature_dump(path);
  if (dump.frames.cols != vocab.size())
    throw FormatError(path.string() + ": n_dims " + std::to_string(dump.frames.cols) +
                      " does not match vocabulary size " + std::to_string(vocab.size()));
  if (dump.hop_samples != kCharHopSamples)
    throw FormatError(path.string() + ": hop " + std::to_string(dump.hop_samples) +
                      " samples, expected " + std::to_string(kCharHopSamples));
  CharPosteriorSequence seq{std::move(dump.frames), kCharHopSamples};
  // float32 storage: allow rounding in the row sums.
  if (!seq.row_stochastic(1e-4))
    throw FormatError(path.string() + ": rows are not probability distributions");
  return seq;
}

void save_cached_predictions(const std::filesystem::path& path, const CharPosteriorSequence& seq) {
  write_feature_dump(path, FeatureDump{seq.frames, seq.hop_samples});
}

CachedProvider::CachedProvider(std::filesystem::path cache_dir, CharVocab vocab)
    : dir_(std::move(cache_dir)), vocab_(std::move(vocab)) {}

std::filesystem::path CachedProvider::path_for(const std::string& id) const {
  return dir_ / (id + ".feat");
}

CharPosteriorSequence CachedProvider::predict(const ClipRequest& clip) const {
  const auto path = path_for(clip.id);
  if (!std::filesystem::exists(path))
    throw FrontendUnavailable("no cached character predictions for clip '" + clip.id +
                              "' (expected " + path.string() + ")");
  CharPosteriorSequence seq = load_cached_predictions(path, vocab_);
  if (clip.wave) {
    const int expect = frame_count(clip.wave->size(), kCharHopSamples);
    if (seq.rows() != expect)
      throw FormatError(path.string() + ": " + std::to_string(seq.rows()) + " frames, clip '" +
                        clip.id + "' needs " + std::to_string(expect));
  }
  return seq;
}

SyntheticProvider::SyntheticProvider(CharVocab vocab, std::uint64_t seed)
    : vocab_(std::move(vocab)), seed_(seed) {}

CharPosteriorSequence SyntheticProvider::predict(const ClipRequest& clip) const {
  if (!clip.wave) throw FrontendUnavailable("synthetic provider needs audio for clip '" + clip.id + "'");
  const int frames = frame_count(clip.wave->size(), kCharHopSamples);
  return synthetic_predictions(clip.text, frames, vocab_, seed_ ^ fnv1a(clip.id));
}

std::unique_ptr<CharProvider> make_provider(const FrontendConfig& config) {
  CharVocab vocab(config.vocab);
  if (config.kind == "cached") {
    if (config.cache_dir.empty()) throw ConfigError("frontend.cache_dir is required for the cached frontend");
    return std::make_unique<CachedProvider>(config.cache_dir, vocab);
  }
  if (config.kind == "synthetic") return std::make_unique<SyntheticProvider>(vocab, config.seed);
  throw ConfigError("frontend.kind must be 'cached' or 'synthetic', got '" + config.kind + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace polyaccent
