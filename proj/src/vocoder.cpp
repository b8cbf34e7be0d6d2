// src/vocoder.cpp

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

#include "polyaccent/vocoder.hpp"

#include <cmath>

#include "polyaccent/errors.hpp"
#include "polyaccent/ops.hpp"

namespace polyaccent {

Tensor assemble_decoder_input(const Tensor& pron, const Tensor& z, const std::vector<Scalar>& f0_hz) {
  if (pron.rank() != 2) throw ShapeError("assemble_decoder_input: pronunciation must be [T, D]");
  if (z.rank() != 1) throw ShapeError("assemble_decoder_input: z must be a vector");
  const int frames = pron.dim(0) * kCharUpsample;
  if (static_cast<std::size_t>(frames) != f0_hz.size())
    throw ShapeError("assemble_decoder_input: " + std::to_string(pron.dim(0)) +
                     " pronunciation frames x " + std::to_string(kCharUpsample) + " != " +
                     std::to_string(f0_hz.size()) + " pitch frames");
  std::vector<Scalar> f0(f0_hz.size());
  for (std::size_t i = 0; i < f0.size(); ++i) f0[i] = std::log1p(f0_hz[i]);
  Tensor f0_col = Tensor::from(std::move(f0), {frames, 1});
  return ops::concat_cols({ops::repeat_rows(pron, kCharUpsample), ops::broadcast_row(z, frames), f0_col});
}

int GeneratorConfig::hop() const {
  int h = 1;
  for (int r : rates) h *= r;
  return h;
}

int GeneratorConfig::width_at(int stage) const {
  return std::max(min_width, base_width >> (stage + 1));
}

ResBlock::ResBlock(int channels, int kernel, const std::vector<int>& dilations, double s,
                   double init_std, std::mt19937_64& rng)
    : slope(s) {
  for (int d : dilations) {
    dilated.emplace_back(channels, channels, kernel, d, rng, init_std);
    plain.emplace_back(channels, channels, kernel, 1, rng, init_std);
  }
}

Tensor ResBlock::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < dilated.size(); ++i) {
    Tensor t = dilated[i].forward(ops::leaky_relu(h, slope));
    t = plain[i].forward(ops::leaky_relu(t, slope));
    h = ops::add(h, t);
  }
  return h;
}

void ResBlock::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  for (std::size_t i = 0; i < dilated.size(); ++i) {
    dilated[i].collect(ps, prefix + "d" + std::to_string(i) + ".");
    plain[i].collect(ps, prefix + "p" + std::to_string(i) + ".");
  }
}

Generator::Generator(const GeneratorConfig& config, std::mt19937_64& rng) : config_(config) {
  if (config.rates.size() != config.up_kernels.size() || config.rates.empty())
    throw ConfigError("generator.rates and generator.up_kernels must have equal non-zero length");
  if (config.hop() != kHopSamples)
    throw ConfigError("generator upsampling rates must multiply to " + std::to_string(kHopSamples));
  pre_ = nn::Conv1d(config.input_dim, config.base_width, config.pre_kernel, 1, rng, config.init_std);
  int cin = config.base_width;
  for (std::size_t i = 0; i < config.rates.size(); ++i) {
    const int cout = config.width_at(static_cast<int>(i));
    ups_.emplace_back(cin, cout, config.up_kernels[i], config.rates[i], rng, config.init_std);
    std::vector<ResBlock> blocks;
    for (int k : config.resblock_kernels)
      blocks.emplace_back(cout, k, config.resblock_dilations, config.slope, config.init_std, rng);
    mrf_.push_back(std::move(blocks));
    cin = cout;
  }
  post_ = nn::Conv1d(cin, 1, config.post_kernel, 1, rng, config.init_std);
}

Tensor Generator::forward(const Tensor& input) const {
  if (input.rank() != 2 || input.dim(1) != config_.input_dim)
    throw ShapeError("generator expects [T, " + std::to_string(config_.input_dim) + "], got " +
                     shape_str(input.shape()));
  Tensor x = pre_.forward(ops::transpose(input));  // [C, T]
  for (std::size_t i = 0; i < ups_.size(); ++i) {
    x = ups_[i].forward(ops::leaky_relu(x, config_.slope));
    std::vector<Tensor> outs;
    for (const auto& b : mrf_[i]) outs.push_back(b.forward(x));
    x = outs.front();
    for (std::size_t j = 1; j < outs.size(); ++j) x = ops::add(x, outs[j]);
    if (outs.size() > 1) x = ops::scale(x, 1.0 / static_cast<double>(outs.size()));
  }
  x = ops::tanh(post_.forward(ops::leaky_relu(x, 0.01)));
  return ops::reshape(x, {x.dim(1)});
}

void Generator::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  pre_.collect(ps, prefix + "pre.");
  for (std::size_t i = 0; i < ups_.size(); ++i) {
    const std::string s = prefix + "up" + std::to_string(i) + ".";
    ups_[i].collect(ps, s);
    for (std::size_t j = 0; j < mrf_[i].size(); ++j)
      mrf_[i][j].collect(ps, s + "res" + std::to_string(j) + ".");
  }
  post_.collect(ps, prefix + "post.");
}

PeriodDiscriminator::PeriodDiscriminator(int period, const DiscriminatorConfig& c, std::mt19937_64& rng)
    : period_(period), slope_(c.slope) {
  const int pad = (c.mpd_kernel - 1) / 2;
  int cin = 1;
  for (int cout : c.mpd_channels) {
    convs_.emplace_back(cin, cout, c.mpd_kernel, c.mpd_stride, pad, rng);
    cin = cout;
  }
  convs_.emplace_back(cin, cin, c.mpd_kernel, 1, pad, rng);
  post_ = nn::Conv1d(cin, 1, 3, 1, 1, rng);
}

SubDiscriminatorOutput PeriodDiscriminator::forward(const Tensor& wave) const {
  SubDiscriminatorOutput out;
  Tensor x = ops::fold_period(wave, period_);  // [1, T / p, p]
  for (const auto& conv : convs_) {
    x = ops::leaky_relu(conv.forward(x), slope_);
    out.features.push_back(x);
  }
  x = post_.forward(x);
  out.features.push_back(x);
  out.score = ops::reshape(x, {static_cast<int>(x.numel())});
  return out;
}

void PeriodDiscriminator::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  for (std::size_t i = 0; i < convs_.size(); ++i) convs_[i].collect(ps, prefix + "conv" + std::to_string(i) + ".");
  post_.collect(ps, prefix + "post.");
}

ScaleDiscriminator::ScaleDiscriminator(const DiscriminatorConfig& c, std::mt19937_64& rng)
    : slope_(c.slope) {
  if (c.msd_channels.size() != c.msd_kernels.size() || c.msd_channels.size() != c.msd_strides.size())
    throw ConfigError("msd channels, kernels and strides must have equal length");
  int cin = 1;
  for (std::size_t i = 0; i < c.msd_channels.size(); ++i) {
    convs_.emplace_back(cin, c.msd_channels[i], c.msd_kernels[i], c.msd_strides[i],
                        (c.msd_kernels[i] - 1) / 2, rng);
    cin = c.msd_channels[i];
  }
  post_ = nn::Conv1d(cin, 1, 3, 1, 1, rng);
}

SubDiscriminatorOutput ScaleDiscriminator::forward(const Tensor& wave) const {
  SubDiscriminatorOutput out;
  Tensor x = wave;
  for (const auto& conv : convs_) {
    x = ops::leaky_relu(conv.forward(x), slope_);
    out.features.push_back(x);
  }
  x = post_.forward(x);
  out.features.push_back(x);
  out.score = ops::reshape(x, {static_cast<int>(x.numel())});
  return out;
}

void ScaleDiscriminator::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  for (std::size_t i = 0; i < convs_.size(); ++i) convs_[i].collect(ps, prefix + "conv" + std::to_string(i) + ".");
  post_.collect(ps, prefix + "post.");
}

HifiDiscriminators::HifiDiscriminators(const DiscriminatorConfig& config, std::mt19937_64& rng)
    : config_(config) {
  for (int p : config.periods) mpd_.emplace_back(p, config, rng);
  for (int s = 0; s < config.msd_scales; ++s) msd_.emplace_back(config, rng);
}

std::vector<SubDiscriminatorOutput> HifiDiscriminators::forward(const Tensor& wave) const {
  if (wave.rank() != 1) throw ShapeError("discriminators expect a waveform vector, got " + shape_str(wave.shape()));
  if (wave.dim(0) < config_.min_samples)
    throw InvalidArgument("discriminators need at least " + std::to_string(config_.min_samples) +
                          " samples, got " + std::to_string(wave.dim(0)));
  Tensor x = ops::reshape(wave, {1, wave.dim(0)});
  std::vector<SubDiscriminatorOutput> out;
  for (const auto& d : mpd_) out.push_back(d.forward(x));
  Tensor scaled = x;
  for (std::size_t s = 0; s < msd_.size(); ++s) {
    if (s > 0) scaled = ops::avg_pool1d(scaled, 4, 2, 2);
    out.push_back(msd_[s].forward(scaled));
  }
  return out;
}

void HifiDiscriminators::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  for (std::size_t i = 0; i < mpd_.size(); ++i) mpd_[i].collect(ps, prefix + "mpd" + std::to_string(i) + ".");
  for (std::size_t i = 0; i < msd_.size(); ++i) msd_[i].collect(ps, prefix + "msd" + std::to_string(i) + ".");
}

ScoreBatch scores_of(const std::vector<std::vector<SubDiscriminatorOutput>>& outs) {
  ScoreBatch b;
  for (const auto& item : outs) {
    std::vector<Tensor> s;
    for (const auto& sub : item) s.push_back(sub.score);
    b.push_back(std::move(s));
  }
  return b;
}

FeatureBatch features_of(const std::vector<std::vector<SubDiscriminatorOutput>>& outs) {
  FeatureBatch b;
  for (const auto& item : outs) {
    std::vector<std::vector<Tensor>> f;
    for (const auto& sub : item) f.push_back(sub.features);
    b.push_back(std::move(f));
  }
  return b;
}

Tensor loss_mel(const Tensor& x, const Tensor& x_hat, const MelConfig& mel) {
  if (x.shape() != x_hat.shape())
    throw InvalidArgument("loss_mel: length mismatch " + shape_str(x.shape()) + " vs " + shape_str(x_hat.shape()));
  return ops::mean_abs_diff(log_mel_spectrogram(x, mel), log_mel_spectrogram(x_hat, mel));
}

namespace {

void check_structure(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ShapeError(std::string(what) + ": structure mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
}

}  // namespace

Tensor loss_hifigan_discriminator(const ScoreBatch& real, const ScoreBatch& fake) {
  if (real.empty() || fake.empty()) throw InvalidArgument("loss_hifigan_discriminator: empty batch");
  check_structure(real.size(), fake.size(), "loss_hifigan_discriminator");
  std::vector<Tensor> per_item;
  for (std::size_t b = 0; b < real.size(); ++b) {
    check_structure(real[b].size(), fake[b].size(), "loss_hifigan_discriminator");
    std::vector<Tensor> terms;
    for (std::size_t k = 0; k < real[b].size(); ++k) {
      terms.push_back(ops::mean_sq_dev(real[b][k], 1));
      terms.push_back(ops::mean_sq_dev(fake[b][k], 0));
    }
    per_item.push_back(ops::add_n(terms));
  }
  return ops::scale(ops::add_n(per_item), 1.0 / static_cast<double>(per_item.size()));
}

Tensor loss_hifigan_adversarial(const ScoreBatch& fake) {
  if (fake.empty()) throw InvalidArgument("loss_hifigan_adversarial: empty batch");
  std::vector<Tensor> per_item;
  for (const auto& item : fake) {
    if (item.empty()) throw InvalidArgument("loss_hifigan_adversarial: no scores");
    std::vector<Tensor> terms;
    for (const auto& s : item) terms.push_back(ops::mean_sq_dev(s, 1));
    per_item.push_back(ops::add_n(terms));
  }
  return ops::scale(ops::add_n(per_item), 1.0 / static_cast<double>(per_item.size()));
}

Tensor loss_feature_matching(const FeatureBatch& real, const FeatureBatch& fake) {
  if (real.empty()) throw InvalidArgument("loss_feature_matching: empty batch");
  check_structure(real.size(), fake.size(), "loss_feature_matching");
  std::vector<Tensor> per_item;
  for (std::size_t b = 0; b < real.size(); ++b) {
    check_structure(real[b].size(), fake[b].size(), "loss_feature_matching");
    std::vector<Tensor> terms;
    for (std::size_t k = 0; k < real[b].size(); ++k) {
      check_structure(real[b][k].size(), fake[b][k].size(), "loss_feature_matching");
      for (std::size_t l = 0; l < real[b][k].size(); ++l) {
        if (real[b][k][l].shape() != fake[b][k][l].shape())
          throw ShapeError("loss_feature_matching: layer shape mismatch " +
                           shape_str(real[b][k][l].shape()) + " vs " + shape_str(fake[b][k][l].shape()));
        terms.push_back(ops::mean_abs_diff(real[b][k][l], fake[b][k][l]));
      }
    }
    per_item.push_back(ops::add_n(terms));
  }
  return ops::scale(ops::add_n(per_item), 1.0 / static_cast<double>(per_item.size()));
}

}  // namespace polyaccent
