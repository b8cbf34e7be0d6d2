// include/polyaccent/training.hpp

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

#ifndef POLYACCENT_TRAINING_HPP_
#define POLYACCENT_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "polyaccent/config.hpp"
#include "polyaccent/model.hpp"

namespace polyaccent {

// ------------------------------------------------------------ data

struct ManifestEntry {
  std::filesystem::path path;
  Accent accent = Accent::AM;
  std::string subset;
  double duration_s = 0;
  std::string text;  // optional; consumed by the synthetic frontend only
};

// One JSON object per line: {"path", "accent", "subset", "duration_s"} and
// optionally "text". Relative paths resolve against the manifest's directory.
// Malformed lines -> FormatError naming the line; unknown accent ->
// InvalidArgument; missing audio file -> FormatError unless require_files is
// false.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path, bool require_files = true);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Cache key of a clip: its file stem.
std::string clip_id(const std::filesystem::path& path);

// One fixed-length training segment with every model input precomputed.
struct Example {
  std::string clip_id;
  Accent accent = Accent::AM;
  Tensor wave;                 // [segment_samples]
  Tensor chars;                // [segment_samples / 320, V]
  Tensor acoustic;             // [segment_samples / 80, 14]
  std::vector<Scalar> f0_hz;   // segment_samples / 80 values
};

// Splits a 16 kHz clip into segments and extracts features for each. Clips
// shorter than half a segment yield nothing.
std::vector<Example> prepare_clip(const Waveform& wave, const std::string& id, Accent accent,
                                  const std::string& text, const CharProvider& provider,
                                  int segment_samples, bool one_hot);

struct Dataset {
  std::vector<ManifestEntry> entries;
  std::vector<std::vector<Example>> segments;  // per entry
};

// Reads, resamples and featurizes every clip (in parallel; the result does
// not depend on the thread count).
Dataset load_dataset(const std::vector<ManifestEntry>& entries, const Config& config);

// Clips drawn with replacement with probability proportional to their
// subset's weight. An epoch is sum over subsets of weight x subset size draws.
class WeightedSampler {
 public:
  WeightedSampler(const std::vector<ManifestEntry>& entries,
                  const std::map<std::string, double>& weights, std::uint64_t seed);
  std::size_t next();
  std::size_t epoch_size() const { return epoch_size_; }
  const std::vector<double>& clip_weights() const { return clip_weights_; }
  std::string state() const;
  void set_state(const std::string& state);

 private:
  std::vector<double> clip_weights_;
  std::discrete_distribution<std::size_t> dist_;
  std::mt19937_64 rng_;
  std::size_t epoch_size_ = 0;
};

// ------------------------------------------------------------ optimization

// lr * decay^floor(iteration / decay_every).
double learning_rate(long long iteration, const TrainingConfig& config);

// Scales all gradients so their joint L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_grad_norm(nn::ParameterSet& params, double max_norm);

// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW() = default;
  AdamW(nn::ParameterSet params, const TrainingConfig& config);
  void step(double lr);
  long long steps() const { return t_; }

  // Moment buffers in parameter order; for checkpointing.
  std::vector<std::vector<Scalar>>& first_moments() { return m_; }
  std::vector<std::vector<Scalar>>& second_moments() { return v_; }
  const std::vector<std::vector<Scalar>>& first_moments() const { return m_; }
  const std::vector<std::vector<Scalar>>& second_moments() const { return v_; }
  void set_steps(long long t) { t_ = t; }
  nn::ParameterSet& params() { return params_; }

 private:
  nn::ParameterSet params_;
  double beta1_ = 0.8, beta2_ = 0.99, eps_ = 1e-8, weight_decay_ = 0.01;
  long long t_ = 0;
  std::vector<std::vector<Scalar>> m_, v_;
};

// ------------------------------------------------------------ training loop

struct LossReport {
  long long iteration = 0;
  double l_mel = 0, l_ad = 0, l_ad_adv = 0, l_hd = 0, l_hd_adv = 0, l_fm = 0;
  double lr = 0;
  bool adversarial_applied = false;
};

// Append-only CSV: iteration,L_mel,L_AD,L_AD_adv,L_HD,L_HD_adv,L_FM,lr
class LossLog {
 public:
  explicit LossLog(const std::filesystem::path& path);
  void append(const LossReport& r);

 private:
  std::ofstream out_;
};

enum class Phase { kHifiDiscriminators, kAccentDiscriminator, kGenerator };

class Trainer {
 public:
  Trainer(Config config, Dataset data);

  // Samples config.training.batch examples and runs one step.
  LossReport step();
  // (a) MSD/MPD update on detached fakes, (b) accent discriminator update on
  // detached embeddings, (c) generator-path update. Throws NonFiniteLoss.
  LossReport train_step(const std::vector<const Example*>& batch);
  // Runs until iteration == until, logging every step if log is set and
  // checkpointing every training.checkpoint_every steps into ckpt_dir.
  void run(long long until, LossLog* log = nullptr, const std::filesystem::path& ckpt_dir = {});

  std::vector<const Example*> sample_batch();
  long long iteration() const { return iteration_; }
  const Config& config() const { return config_; }
  Model& model() { return model_; }
  const Model& model() const { return model_; }
  const Dataset& data() const { return data_; }
  // Called after each phase of train_step.
  void set_phase_observer(std::function<void(Phase)> fn) { observer_ = std::move(fn); }

  void save_checkpoint(const std::filesystem::path& path) const;
  void load_checkpoint(const std::filesystem::path& path);

 private:
  Config config_;
  Dataset data_;
  Model model_;
  AdamW gen_opt_, accent_opt_, hifi_opt_;
  WeightedSampler sampler_;
  std::mt19937_64 segment_rng_;
  std::mt19937_64 dropout_rng_;
  long long iteration_ = 0;
  long long single_class_batches_ = 0;
  std::function<void(Phase)> observer_;
};

// ------------------------------------------------------------ checkpoints

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct OptimizerState {
  long long steps = 0;
  std::vector<std::vector<Scalar>> m, v;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  long long iteration = 0;
  std::string config_text;
  std::string sampler_state, segment_rng_state, dropout_rng_state;
  std::vector<std::pair<std::string, Tensor>> params;  // Model::all() order
  std::vector<OptimizerState> optimizers;              // generator path, accent, hifi

  bool operator==(const Checkpoint& o) const;
};

// Written atomically (temp file + rename).
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
// VersionError on a format mismatch, CorruptFileError on truncation.
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Copies checkpoint parameters into model; VersionError if names or shapes
// disagree with the model built from the checkpoint's own config.
void assign_parameters(const Checkpoint& ckpt, Model& model);

struct LoadedModel {
  Config config;
  Model model;
  long long iteration;
};
LoadedModel load_model(const std::filesystem::path& checkpoint);

// Fresh, untrained checkpoint (used to initialize training and for tests).
Checkpoint initial_checkpoint(const Config& config);

}  // namespace polyaccent

#endif  // POLYACCENT_TRAINING_HPP_
