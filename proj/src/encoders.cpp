// src/encoders.cpp

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

#include "polyaccent/encoders.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "polyaccent/errors.hpp"
#include "polyaccent/ops.hpp"

namespace polyaccent {

TransformerBlock::TransformerBlock(int dim, int heads, int ff_dim, std::mt19937_64& rng)
    : norm1(dim), norm2(dim), attention(dim, heads, rng), ff_in(dim, ff_dim, rng),
      ff_out(ff_dim, dim, rng) {}

Tensor TransformerBlock::forward(const Tensor& x) const {
  Tensor h = ops::add(x, attention.forward(norm1.forward(x)));
  Tensor f = ff_out.forward(ops::relu(ff_in.forward(norm2.forward(h))));
  return ops::add(h, f);
}

void TransformerBlock::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  norm1.collect(ps, prefix + "norm1.");
  attention.collect(ps, prefix + "attn.");
  norm2.collect(ps, prefix + "norm2.");
  ff_in.collect(ps, prefix + "ff_in.");
  ff_out.collect(ps, prefix + "ff_out.");
}

PronunciationEncoder::PronunciationEncoder(const PronunciationConfig& config, std::mt19937_64& rng)
    : config_(config) {
  if (config.d_model % config.heads != 0)
    throw ConfigError("pronunciation.d_model must be divisible by pronunciation.heads");
  accent_table_ = nn::normal_param({kNumAccents, config.accent_dim}, 1.0, rng);
  input_proj_ = nn::Linear(config.vocab_size + config.accent_dim, config.d_model, rng);
  positions_ = nn::normal_param({config.max_positions, config.d_model}, 0.02, rng);
  for (int i = 0; i < config.layers; ++i)
    blocks_.emplace_back(config.d_model, config.heads, config.ff_dim, rng);
  final_norm_ = nn::LayerNorm(config.d_model);
}

Tensor PronunciationEncoder::embed_accent(Accent accent) const {
  const int i = accent_index(accent);
  if (i < 0 || i >= kNumAccents) throw InvalidArgument("embed_accent: accent index out of range");
  return ops::gather_row(accent_table_, i);
}

Tensor PronunciationEncoder::forward(const Tensor& chars, Accent accent,
                                     const nn::ForwardContext& ctx) const {
  if (chars.rank() != 2 || chars.dim(1) != config_.vocab_size)
    throw ShapeError("pronunciation encoder expects [T, " + std::to_string(config_.vocab_size) +
                     "] character frames, got " + shape_str(chars.shape()));
  const int t = chars.dim(0);
  if (t > config_.max_positions)
    throw ShapeError("pronunciation encoder: " + std::to_string(t) + " frames exceed " +
                     std::to_string(config_.max_positions) + " positions");
  Tensor a = ops::broadcast_row(embed_accent(accent), t);
  Tensor x = input_proj_.forward(ops::concat_cols({chars, a}));
  x = ops::add(x, ops::slice_rows(positions_, 0, t));
  for (const auto& b : blocks_) x = b.forward(x);
  x = final_norm_.forward(x);
  return ops::dropout(x, config_.dropout, ctx.dropout_rng());
}

void PronunciationEncoder::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  ps.add(prefix + "accent_table", accent_table_);
  input_proj_.collect(ps, prefix + "input_proj.");
  ps.add(prefix + "positions", positions_);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    blocks_[i].collect(ps, prefix + "block" + std::to_string(i) + ".");
  final_norm_.collect(ps, prefix + "final_norm.");
}

Tensor mean_pool(const Tensor& seq) {
  if (seq.rank() != 2) throw ShapeError("mean_pool expects [T, D], got " + shape_str(seq.shape()));
  if (seq.dim(0) == 0) throw InvalidArgument("mean_pool: empty sequence");
  // Each column is summed in sorted order so that any row permutation gives
  // a bit-identical result.
  const int t = seq.dim(0), d = seq.dim(1);
  auto v = seq.values();
  std::vector<Scalar> out(static_cast<std::size_t>(d)), col(static_cast<std::size_t>(t));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < t; ++i) col[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i) * d + j];
    std::sort(col.begin(), col.end());
    Scalar acc = 0;
    for (Scalar x : col) acc += x;
    out[static_cast<std::size_t>(j)] = acc / t;
  }
  return detail::make_result(std::move(out), {d}, {seq}, [t, d](detail::Node& self) {
    auto& parent = *self.parents[0];
    if (!parent.requires_grad) return;
    auto g = parent.grad_buffer();
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(i) * d + j] += self.grad[static_cast<std::size_t>(j)] / t;
  });
}

AcousticEncoder::AcousticEncoder(const AcousticConfig& config, std::mt19937_64& rng)
    : config_(config) {
  const std::size_t n = config.widths.size();
  if (n == 0 || config.kernels.size() != n || config.dilations.size() != n)
    throw ConfigError("acoustic.widths, kernels and dilations must have equal non-zero length");
  int cin = config.input_dim;
  for (std::size_t i = 0; i < n; ++i) {
    convs_.emplace_back(cin, config.widths[i], config.kernels[i], config.dilations[i], rng);
    norms_.emplace_back(config.widths[i]);
    cin = config.widths[i];
  }
  if (cin % config.attention_heads != 0)
    throw ConfigError("acoustic embedding width must be divisible by acoustic.attention_heads");
  attention_ = nn::MultiHeadSelfAttention(cin, config.attention_heads, rng);
}

Tensor AcousticEncoder::encode_frames(const Tensor& frames) const {
  if (frames.rank() != 2 || frames.dim(1) != config_.input_dim)
    throw ShapeError("acoustic encoder expects [T, " + std::to_string(config_.input_dim) +
                     "] frames, got " + shape_str(frames.shape()));
  if (frames.dim(0) == 0) throw InvalidArgument("acoustic encoder: empty frame sequence");
  Tensor h = frames;  // [T, C]
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    Tensor c = convs_[i].forward(ops::transpose(h));  // [C', T]
    h = ops::leaky_relu(norms_[i].forward(ops::transpose(c)), config_.slope);
  }
  return attention_.forward(h);
}

Tensor AcousticEncoder::forward(const Tensor& frames) const {
  return mean_pool(encode_frames(frames));
}

void AcousticEncoder::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].collect(ps, prefix + "conv" + std::to_string(i) + ".");
    norms_[i].collect(ps, prefix + "norm" + std::to_string(i) + ".");
  }
  attention_.collect(ps, prefix + "attn.");
}

AccentDiscriminator::AccentDiscriminator(int input_dim, const AdversaryConfig& config,
                                         std::mt19937_64& rng)
    : hidden_(input_dim, config.hidden, rng), out_(config.hidden, 1, rng), eps_(config.eps) {}

Tensor AccentDiscriminator::forward(const Tensor& z) const {
  if (z.rank() != 1) throw ShapeError("accent discriminator expects a vector, got " + shape_str(z.shape()));
  Tensor x = ops::reshape(z, {1, z.dim(0)});
  Tensor logit = out_.forward(ops::relu(hidden_.forward(x)));
  return ops::clamp(ops::reshape(ops::sigmoid(logit), {1}), eps_, 1 - eps_);
}

void AccentDiscriminator::collect(nn::ParameterSet& ps, const std::string& prefix) const {
  hidden_.collect(ps, prefix + "hidden.");
  out_.collect(ps, prefix + "out.");
}

namespace {

constexpr double kEps = 1e-7;

// -mean over the selected items of log(p) (or log(1 - p) if complement).
Tensor neg_mean_log(const std::vector<Tensor>& probs, const std::vector<bool>& native,
                    bool want_native, bool complement) {
  std::vector<Tensor> terms;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (native[i] != want_native) continue;
    Tensor p = ops::clamp(probs[i], kEps, 1 - kEps);
    if (complement) p = ops::add_scalar(ops::scale(p, -1), 1);
    terms.push_back(ops::sum(ops::log(p)));
  }
  if (terms.empty()) return Tensor::scalar(0);
  return ops::scale(ops::add_n(terms), -1.0 / static_cast<double>(terms.size()));
}

void check_batch(const std::vector<Tensor>& probs, const std::vector<bool>& native, const char* what) {
  if (probs.empty()) throw InvalidArgument(std::string(what) + ": empty batch");
  if (probs.size() != native.size())
    throw InvalidArgument(std::string(what) + ": " + std::to_string(probs.size()) +
                          " probabilities but " + std::to_string(native.size()) + " labels");
}

}  // namespace

AccentLoss loss_accent_discriminator(const std::vector<Tensor>& probs,
                                     const std::vector<bool>& native) {
  check_batch(probs, native, "loss_accent_discriminator");
  AccentLoss out;
  const auto n_native = std::count(native.begin(), native.end(), true);
  out.missing_native = n_native == 0;
  out.missing_foreign = n_native == static_cast<long>(native.size());
  if (out.missing_native || out.missing_foreign)
    spdlog::debug("accent discriminator batch has no {} items; that term is 0",
                 out.missing_native ? "native" : "foreign");
  out.value = ops::add(neg_mean_log(probs, native, true, false),
                       neg_mean_log(probs, native, false, true));
  return out;
}

AccentLoss loss_accent_adversarial(const std::vector<Tensor>& probs,
                                   const std::vector<bool>& native) {
  check_batch(probs, native, "loss_accent_adversarial");
  AccentLoss out;
  out.missing_foreign = std::count(native.begin(), native.end(), false) == 0;
  out.value = neg_mean_log(probs, native, false, false);
  return out;
}

}  // namespace polyaccent
