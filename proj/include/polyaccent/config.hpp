// include/polyaccent/config.hpp

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

#ifndef POLYACCENT_CONFIG_HPP_
#define POLYACCENT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "polyaccent/encoders.hpp"
#include "polyaccent/frontend.hpp"
#include "polyaccent/vocoder.hpp"

namespace polyaccent {

struct TrainingConfig {
  double lr = 2e-4;
  double lr_decay = 0.999;
  int decay_every = 1000;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  double grad_clip = 10.0;
  int batch = 4;
  int total_steps = 20000;
  std::uint64_t seed = 1234;
  double lambda_mel = 45;
  double lambda_fm = 2;
  double lambda_hd = 1;
  int segment_samples = kSegmentSamples;
  int checkpoint_every = 1000;
};

struct Config {
  FrontendConfig frontend;
  PronunciationConfig pronunciation;
  AcousticConfig acoustic;
  AdversaryConfig adversary;
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  TrainingConfig training;
  // Relative appearance rate per epoch for clips of each subset.
  std::map<std::string, double> subset_weights{
      {"LibriTTS", 1}, {"VCTK", 6}, {"SAA", 10}, {"L2-Arctic", 15}, {"IndicTTS", 2}};

  // Fills the derived sizes (vocabulary, decoder input width) and checks
  // invariants; throws ConfigError.
  void finalize();
};

// Desk-scale defaults.
Config desk_config();
// The published schedule: 3M steps, 50k warm-up iterations, batch 16.
Config paper_config();

// Reduced widths and 160 ms segments for single-core experiments and tests.
Config tiny_config();

// INI text with [section] headers; keys not listed in the schema are
// rejected. Missing keys keep the desk defaults. Lists are comma separated.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& config);

}  // namespace polyaccent

#endif  // POLYACCENT_CONFIG_HPP_
