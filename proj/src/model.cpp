// src/model.cpp

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

#include "polyaccent/model.hpp"

namespace polyaccent {

namespace {

// Each module draws from its own stream so that resizing one module leaves
// the initialization of the others unchanged.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

template <typename T, typename... Args>
T build(std::uint64_t seed, std::uint64_t index, Args&&... args) {
  auto rng = stream(seed, index);
  return T(std::forward<Args>(args)..., rng);
}

}  // namespace

Model::Model(const Config& config, std::uint64_t seed)
    : pron(build<PronunciationEncoder>(seed, 1, config.pronunciation)),
      acoustic(build<AcousticEncoder>(seed, 2, config.acoustic)),
      accent_disc(build<AccentDiscriminator>(seed, 3, config.acoustic.embedding_dim(), config.adversary)),
      generator(build<Generator>(seed, 4, config.generator)),
      hifi(build<HifiDiscriminators>(seed, 5, config.discriminator)) {}

nn::ParameterSet Model::generator_path() const {
  nn::ParameterSet ps;
  pron.collect(ps);
  acoustic.collect(ps);
  generator.collect(ps);
  return ps;
}

nn::ParameterSet Model::accent_discriminator() const {
  nn::ParameterSet ps;
  accent_disc.collect(ps);
  return ps;
}

nn::ParameterSet Model::hifi_discriminators() const {
  nn::ParameterSet ps;
  hifi.collect(ps);
  return ps;
}

nn::ParameterSet Model::all() const {
  nn::ParameterSet ps = generator_path();
  ps.append(accent_discriminator());
  ps.append(hifi_discriminators());
  return ps;
}

SynthesisOutput synthesize(const Model& model, const Tensor& chars, Accent accent,
                           const Tensor& acoustic_frames, const std::vector<Scalar>& f0_hz,
                           const nn::ForwardContext& ctx) {
  SynthesisOutput out;
  Tensor pron = model.pron.forward(chars, accent, ctx);
  out.z = model.acoustic.forward(acoustic_frames);
  out.wave = model.generator.forward(assemble_decoder_input(pron, out.z, f0_hz));
  return out;
}

}  // namespace polyaccent
