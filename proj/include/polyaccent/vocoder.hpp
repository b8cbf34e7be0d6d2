// include/polyaccent/vocoder.hpp

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

#ifndef POLYACCENT_VOCODER_HPP_
#define POLYACCENT_VOCODER_HPP_

#include <random>
#include <vector>

#include "polyaccent/features.hpp"
#include "polyaccent/nn.hpp"

namespace polyaccent {

// [4 * T_char, D_pron + D_z + 1]: pronunciation rows repeated 4x, z on every
// row, log1p(f0) last. Throws ShapeError unless 4 * T_char == pitch frames.
Tensor assemble_decoder_input(const Tensor& pron, const Tensor& z,
                              const std::vector<Scalar>& f0_hz);

struct GeneratorConfig {
  int input_dim = 513;
  int base_width = 128;
  int pre_kernel = 11;
  std::vector<int> rates{5, 4, 2, 2};
  std::vector<int> up_kernels{10, 8, 4, 4};
  std::vector<int> resblock_kernels{3, 7, 11};
  std::vector<int> resblock_dilations{1, 3, 5};
  int min_width = 1;
  int post_kernel = 7;
  double slope = 0.1;
  double init_std = 0.01;

  int hop() const;
  int width_at(int stage) const;  // channels after upsampling stage `stage`
};

// Residual stack: for each dilation d,
//   x += conv_1(lrelu(conv_d(lrelu(x)))).
struct ResBlock {
  std::vector<nn::Conv1d> dilated, plain;
  double slope = 0.1;

  ResBlock() = default;
  ResBlock(int channels, int kernel, const std::vector<int>& dilations, double slope,
           double init_std, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix) const;
};

class Generator {
 public:
  Generator() = default;
  Generator(const GeneratorConfig& config, std::mt19937_64& rng);

  // [T, input_dim] -> [hop * T] samples in (-1, 1).
  Tensor forward(const Tensor& input) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix = "gen.") const;
  const GeneratorConfig& config() const { return config_; }

 private:
  GeneratorConfig config_;
  nn::Conv1d pre_;
  std::vector<nn::ConvTranspose1d> ups_;
  std::vector<std::vector<ResBlock>> mrf_;
  nn::Conv1d post_;
};

struct DiscriminatorConfig {
  std::vector<int> periods{2, 3, 5, 7, 11};
  std::vector<int> mpd_channels{32, 64, 128, 256};  // stride-3 layers; one stride-1 layer follows
  int mpd_kernel = 5;
  int mpd_stride = 3;
  int msd_scales = 3;
  std::vector<int> msd_channels{16, 32, 64, 128, 128, 128};
  std::vector<int> msd_kernels{15, 21, 21, 21, 21, 5};
  std::vector<int> msd_strides{1, 2, 2, 4, 4, 1};
  double slope = 0.1;
  int min_samples = 640;
};

struct SubDiscriminatorOutput {
  Tensor score;                   // flattened logits
  std::vector<Tensor> features;   // per-layer activations, score last
};

class PeriodDiscriminator {
 public:
  PeriodDiscriminator() = default;
  PeriodDiscriminator(int period, const DiscriminatorConfig& config, std::mt19937_64& rng);
  SubDiscriminatorOutput forward(const Tensor& wave) const;  // wave [1, T]
  void collect(nn::ParameterSet& ps, const std::string& prefix) const;

 private:
  int period_ = 2;
  double slope_ = 0.1;
  std::vector<nn::Conv1d> convs_;
  nn::Conv1d post_;
};

class ScaleDiscriminator {
 public:
  ScaleDiscriminator() = default;
  ScaleDiscriminator(const DiscriminatorConfig& config, std::mt19937_64& rng);
  SubDiscriminatorOutput forward(const Tensor& wave) const;  // wave [1, T]
  void collect(nn::ParameterSet& ps, const std::string& prefix) const;

 private:
  double slope_ = 0.1;
  std::vector<nn::Conv1d> convs_;
  nn::Conv1d post_;
};

// MPD (one per period) followed by MSD (raw, then average-pooled x2, x4).
class HifiDiscriminators {
 public:
  HifiDiscriminators() = default;
  HifiDiscriminators(const DiscriminatorConfig& config, std::mt19937_64& rng);

  // wave [T], T >= min_samples; otherwise InvalidArgument.
  std::vector<SubDiscriminatorOutput> forward(const Tensor& wave) const;
  int count() const { return static_cast<int>(mpd_.size() + msd_.size()); }
  void collect(nn::ParameterSet& ps, const std::string& prefix = "hifi_disc.") const;

 private:
  DiscriminatorConfig config_;
  std::vector<PeriodDiscriminator> mpd_;
  std::vector<ScaleDiscriminator> msd_;
};

// Batched containers: [batch][sub-discriminator] and
// [batch][sub-discriminator][layer].
using ScoreBatch = std::vector<std::vector<Tensor>>;
using FeatureBatch = std::vector<std::vector<std::vector<Tensor>>>;

ScoreBatch scores_of(const std::vector<std::vector<SubDiscriminatorOutput>>& outs);
FeatureBatch features_of(const std::vector<std::vector<SubDiscriminatorOutput>>& outs);

// Mean absolute difference of the two log-mel spectrograms over all bins.
Tensor loss_mel(const Tensor& x, const Tensor& x_hat, const MelConfig& mel = {});
// Batch mean of sum_k [mean (r_k - 1)^2 + mean f_k^2].
Tensor loss_hifigan_discriminator(const ScoreBatch& real, const ScoreBatch& fake);
// Batch mean of sum_k mean (f_k - 1)^2.
Tensor loss_hifigan_adversarial(const ScoreBatch& fake);
// Batch mean of sum_k sum_l mean |r_kl - f_kl|.
Tensor loss_feature_matching(const FeatureBatch& real, const FeatureBatch& fake);

}  // namespace polyaccent

#endif  // POLYACCENT_VOCODER_HPP_
