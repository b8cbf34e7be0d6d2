// src/conversion.cpp

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

#include "polyaccent/conversion.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>

#include "polyaccent/errors.hpp"
#include "polyaccent/features.hpp"

namespace polyaccent {

namespace fs = std::filesystem;

Waveform convert_waveform(const LoadedModel& loaded, const Waveform& input, Accent target,
                          const CharProvider& provider, const std::string& clip_id,
                          const std::string& text) {
  if (input.empty()) throw InvalidArgument("convert: input '" + clip_id + "' has no samples");
  const Waveform wave = resample(input, kSampleRate);
  const int seg = loaded.config.training.segment_samples;
  const int char_rows = seg / kCharHopSamples;
  CharPosteriorSequence chars = provider.predict(ClipRequest{clip_id, &wave, text});
  if (loaded.config.frontend.one_hot) chars = to_one_hot(chars);

  NoGradGuard no_grad;
  const nn::ForwardContext ctx{false, nullptr};
  Waveform out;
  out.samples.reserve(wave.size() + seg);
  const std::size_t n_seg = (wave.size() + seg - 1) / seg;
  for (std::size_t s = 0; s < n_seg; ++s) {
    Waveform piece;
    const std::size_t begin = s * seg;
    const std::size_t end = std::min(wave.size(), begin + seg);
    piece.samples.assign(wave.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                         wave.samples.begin() + static_cast<std::ptrdiff_t>(end));
    piece.samples.resize(static_cast<std::size_t>(seg), 0.0);
    const PitchTrack pitch = extract_pitch(piece);
    const Tensor c = slice_or_pad(chars, static_cast<int>(s) * char_rows, char_rows, provider.vocab()).frames.to_tensor();
    const auto result = synthesize(loaded.model, c, target, acoustic_frames(piece, pitch).to_tensor(), pitch.f0_hz, ctx);
    out.samples.insert(out.samples.end(), result.wave.values().begin(), result.wave.values().end());
  }
  out.samples.resize(wave.size());
  if (input.sample_rate == kSampleRate) return out;
  Waveform back = resample(out, input.sample_rate);
  back.samples.resize(input.size(), 0.0);
  return back;
}

void write_wav_atomic(const fs::path& path, const Waveform& wave) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  write_wav(tmp, wave);
  fs::rename(tmp, path);
}

namespace {

std::unique_ptr<CharProvider> provider_for(const LoadedModel& m, const InferenceOptions& o) {
  return make_provider(o.frontend ? *o.frontend : m.config.frontend);
}

}  // namespace

void convert(const ConversionRequest& request, const InferenceOptions& options) {
  const LoadedModel model = load_model(request.checkpoint_path);
  const auto provider = provider_for(model, options);
  const Waveform in = read_wav(request.input_path);
  write_wav_atomic(request.output_path,
                   convert_waveform(model, in, request.target_accent, *provider, clip_id(request.input_path)));
}

BatchReport batch_convert(const fs::path& manifest, const std::vector<Accent>& accents,
                          const fs::path& checkpoint, const fs::path& out_dir,
                          const InferenceOptions& options) {
  const auto entries = read_manifest(manifest, false);
  BatchReport report;
  if (accents.empty() || entries.empty()) return report;
  const LoadedModel model = load_model(checkpoint);
  const auto provider = provider_for(model, options);
  fs::create_directories(out_dir);

  const std::size_t n = entries.size() * accents.size();
  std::vector<std::optional<fs::path>> outputs(n);
  std::vector<std::optional<ItemFailure>> failures(n);
  std::vector<std::optional<Waveform>> inputs(entries.size());
  std::vector<std::string> read_errors(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      inputs[i] = read_wav(entries[i].path);
    } catch (const std::exception& e) {
      read_errors[i] = e.what();
    }
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k / accents.size();
    const Accent a = accents[k % accents.size()];
    const std::string id = clip_id(entries[i].path);
    try {
      if (!inputs[i]) throw FormatError(read_errors[i]);
      const fs::path out = out_dir / (id + "." + accent_code(a) + ".wav");
      write_wav_atomic(out, convert_waveform(model, *inputs[i], a, *provider, id, entries[i].text));
      outputs[k] = out;
    } catch (const std::exception& e) {
      failures[k] = ItemFailure{entries[i].path.string(), accent_code(a), e.what()};
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (outputs[k]) report.outputs.push_back(*outputs[k]);
    if (failures[k]) {
      spdlog::error("{} -> {}: {}", failures[k]->clip, failures[k]->accent, failures[k]->message);
      report.failures.push_back(*failures[k]);
    }
  }
  return report;
}

}  // namespace polyaccent
