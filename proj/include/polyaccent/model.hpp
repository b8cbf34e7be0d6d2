// include/polyaccent/model.hpp

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

#ifndef POLYACCENT_MODEL_HPP_
#define POLYACCENT_MODEL_HPP_

#include <random>

#include "polyaccent/config.hpp"

namespace polyaccent {

// Every trainable module, built from one Config and seed.
struct Model {
  PronunciationEncoder pron;
  AcousticEncoder acoustic;
  AccentDiscriminator accent_disc;
  Generator generator;
  HifiDiscriminators hifi;

  Model(const Config& config, std::uint64_t seed);

  // Both encoders and the generator.
  nn::ParameterSet generator_path() const;
  nn::ParameterSet accent_discriminator() const;
  nn::ParameterSet hifi_discriminators() const;
  // All of the above, in checkpoint order.
  nn::ParameterSet all() const;
};

struct SynthesisOutput {
  Tensor wave;  // [80 * T]
  Tensor z;     // acoustic embedding of the source
};

// chars [T_char, V], acoustic frames [4 T_char, 14], f0 with 4 T_char entries.
SynthesisOutput synthesize(const Model& model, const Tensor& chars, Accent accent,
                           const Tensor& acoustic_frames, const std::vector<Scalar>& f0_hz,
                           const nn::ForwardContext& ctx);

}  // namespace polyaccent

#endif  // POLYACCENT_MODEL_HPP_
