// include/polyaccent/conversion.hpp

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

#ifndef POLYACCENT_CONVERSION_HPP_
#define POLYACCENT_CONVERSION_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polyaccent/training.hpp"

namespace polyaccent {

struct ConversionRequest {
  std::filesystem::path input_path;
  Accent target_accent = Accent::AM;
  std::filesystem::path checkpoint_path;
  std::filesystem::path output_path;
};

// Converts one waveform: pronunciation from the target accent, acoustic
// embedding from the source, segments generated independently and stitched.
// The output has the input's sample rate and exact length.
Waveform convert_waveform(const LoadedModel& model, const Waveform& input, Accent target,
                          const CharProvider& provider, const std::string& clip_id,
                          const std::string& text = "");

// Frontend override for inference; unset keeps the checkpoint's frontend.
struct InferenceOptions {
  std::optional<FrontendConfig> frontend;
};

// Loads the checkpoint, converts, writes output_path atomically.
void convert(const ConversionRequest& request, const InferenceOptions& options = {});

struct ItemFailure {
  std::string clip;
  std::string accent;
  std::string message;
};

struct BatchReport {
  std::vector<std::filesystem::path> outputs;
  std::vector<ItemFailure> failures;
};

// One output <out_dir>/<stem>.<accent>.wav per (clip, accent); per-item
// errors are collected rather than thrown.
BatchReport batch_convert(const std::filesystem::path& manifest, const std::vector<Accent>& accents,
                          const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir,
                          const InferenceOptions& options = {});

// write_wav to a sibling temporary file, then rename.
void write_wav_atomic(const std::filesystem::path& path, const Waveform& wave);

}  // namespace polyaccent

#endif  // POLYACCENT_CONVERSION_HPP_
