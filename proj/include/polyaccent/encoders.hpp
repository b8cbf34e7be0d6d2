// include/polyaccent/encoders.hpp

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

#ifndef POLYACCENT_ENCODERS_HPP_
#define POLYACCENT_ENCODERS_HPP_

#include <random>
#include <vector>

#include "polyaccent/accent.hpp"
#include "polyaccent/nn.hpp"

namespace polyaccent {

struct PronunciationConfig {
  int vocab_size = 29;
  int accent_dim = 128;
  int d_model = 256;
  int layers = 4;
  int heads = 8;
  int ff_dim = 1024;
  int max_positions = 224;
  double dropout = 0.3;  // on the encoder output, training only
};

// Pre-norm transformer block: x + MHA(LN(x)), then x + FF(LN(x)).
struct TransformerBlock {
  nn::LayerNorm norm1, norm2;
  nn::MultiHeadSelfAttention attention;
  nn::Linear ff_in, ff_out;

  TransformerBlock() = default;
  TransformerBlock(int dim, int heads, int ff_dim, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix) const;
};

class PronunciationEncoder {
 public:
  PronunciationEncoder() = default;
  PronunciationEncoder(const PronunciationConfig& config, std::mt19937_64& rng);

  // Row of the accent table; gradients reach only that row.
  Tensor embed_accent(Accent accent) const;
  // chars [T, V] -> [T, d_model].
  Tensor forward(const Tensor& chars, Accent accent, const nn::ForwardContext& ctx) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix = "pron.") const;
  const PronunciationConfig& config() const { return config_; }

 private:
  PronunciationConfig config_;
  Tensor accent_table_;  // [8, accent_dim]
  nn::Linear input_proj_;
  Tensor positions_;     // [max_positions, d_model]
  std::vector<TransformerBlock> blocks_;
  nn::LayerNorm final_norm_;
};

struct AcousticConfig {
  int input_dim = 14;
  std::vector<int> widths{64, 128, 256, 256};
  std::vector<int> kernels{5, 3, 3, 1};
  std::vector<int> dilations{1, 2, 1, 1};
  int attention_heads = 4;
  double slope = 0.1;

  int embedding_dim() const { return widths.back(); }
};

// Arithmetic mean over rows of [T, D]. T == 0 -> InvalidArgument.
Tensor mean_pool(const Tensor& seq);

class AcousticEncoder {
 public:
  AcousticEncoder() = default;
  AcousticEncoder(const AcousticConfig& config, std::mt19937_64& rng);

  // Per-frame encodings [T, D] before pooling.
  Tensor encode_frames(const Tensor& frames) const;
  // frames [T, 14] -> z [D].
  Tensor forward(const Tensor& frames) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix = "acoustic.") const;
  const AcousticConfig& config() const { return config_; }

 private:
  AcousticConfig config_;
  std::vector<nn::Conv1d> convs_;
  std::vector<nn::LayerNorm> norms_;
  nn::MultiHeadSelfAttention attention_;
};

struct AdversaryConfig {
  bool enabled = true;
  int hidden = 128;
  int warmup_steps = 1000;
  double lambda = 1.0;
  double eps = 1e-7;
};

// Native (1) / foreign (0) classifier over the acoustic embedding.
class AccentDiscriminator {
 public:
  AccentDiscriminator() = default;
  AccentDiscriminator(int input_dim, const AdversaryConfig& config, std::mt19937_64& rng);

  // z [D] -> probability, shape [1], clamped to [eps, 1 - eps].
  Tensor forward(const Tensor& z) const;
  void collect(nn::ParameterSet& ps, const std::string& prefix = "accent_disc.") const;

 private:
  nn::Linear hidden_, out_;
  double eps_ = 1e-7;
};

struct AccentLoss {
  Tensor value;            // scalar
  bool missing_native = false;
  bool missing_foreign = false;
};

// -mean_N log p - mean_F log(1 - p). An empty class contributes 0 and is
// flagged (and logged). Empty batch -> InvalidArgument.
AccentLoss loss_accent_discriminator(const std::vector<Tensor>& probs,
                                     const std::vector<bool>& native);
// -mean_F log p over foreign items only; no foreign items -> 0, flagged.
AccentLoss loss_accent_adversarial(const std::vector<Tensor>& probs,
                                   const std::vector<bool>& native);

}  // namespace polyaccent

#endif  // POLYACCENT_ENCODERS_HPP_
