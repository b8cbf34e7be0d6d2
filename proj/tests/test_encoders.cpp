// tests/test_encoders.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "loss_oracles.hpp"
#include "polyaccent/encoders.hpp"
#include "polyaccent/errors.hpp"
#include "polyaccent/frontend.hpp"
#include "polyaccent/ops.hpp"

using namespace polyaccent;

namespace {

PronunciationConfig small_pron() {
  PronunciationConfig c;
  c.accent_dim = 8;
  c.d_model = 16;
  c.heads = 4;
  c.ff_dim = 32;
  c.layers = 2;
  return c;
}

AcousticConfig small_acoustic() {
  AcousticConfig c;
  c.widths = {8, 8, 16, 16};
  c.attention_heads = 4;
  return c;
}

Tensor char_frames(int t, std::uint64_t seed) {
  auto seq = synthetic_predictions("", t, CharVocab{}, seed);
  return seq.frames.to_tensor();
}

double l2_diff(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += std::pow(a.values()[i] - b.values()[i], 2);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("accent codes and native classes") {
  CHECK(parse_accent("AM") == Accent::AM);
  CHECK(accent_code(Accent::VI) == "VI");
  CHECK_THROWS_AS(parse_accent("XX"), InvalidArgument);
  CHECK_THROWS_AS(parse_accent("am"), InvalidArgument);
  int native = 0;
  for (auto code : kAccentCodes) native += is_native(parse_accent(code));
  CHECK(native == 2);
  CHECK(is_native(Accent::BR));
  CHECK(parse_accent_list("AM,HI, KO") == std::vector<Accent>{Accent::AM, Accent::HI, Accent::KO});
  CHECK(parse_accent_list("").empty());
}

TEST_CASE("accent embedding lookup") {
  std::mt19937_64 rng(1);
  PronunciationEncoder enc(PronunciationConfig{}, rng);
  nn::ParameterSet ps;
  enc.collect(ps);
  Tensor table = ps.items().front().second;
  CHECK(table.shape() == Shape{8, 128});
  Tensor am = enc.embed_accent(Accent::AM);
  CHECK(am.shape() == Shape{128});
  CHECK(std::equal(am.values().begin(), am.values().end(), table.values().begin()));
  CHECK(l2_diff(enc.embed_accent(Accent::HI), am) > 0);
  Tensor again = enc.embed_accent(Accent::AM);
  CHECK(std::equal(am.values().begin(), am.values().end(), again.values().begin()));

  // Gradient reaches only the selected row.
  table.zero_grad();
  ops::sum(enc.embed_accent(Accent::KO)).backward();
  auto g = table.grad();
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 128; ++c)
      CHECK(g[static_cast<std::size_t>(r * 128 + c)] == (r == accent_index(Accent::KO) ? 1.0 : 0.0));
}

TEST_CASE("pronunciation encoder: shapes, accent sensitivity, determinism, dropout") {
  std::mt19937_64 rng(2);
  PronunciationEncoder enc(PronunciationConfig{}, rng);
  Tensor chars = char_frames(56, 3);
  nn::ForwardContext eval;
  Tensor hi = enc.forward(chars, Accent::HI, eval);
  CHECK(hi.shape() == Shape{56, 256});
  Tensor am = enc.forward(chars, Accent::AM, eval);
  CHECK(l2_diff(hi, am) > 0);
  CHECK(l2_diff(enc.forward(chars, Accent::HI, eval), hi) == 0.0);
  for (double v : hi.values()) CHECK(std::isfinite(v));

  std::mt19937_64 drng(9);
  nn::ForwardContext train{true, &drng};
  Tensor d1 = enc.forward(chars, Accent::HI, train);
  Tensor d2 = enc.forward(chars, Accent::HI, train);
  CHECK(l2_diff(d1, d2) > 0);
  const auto zeros = std::count(d1.values().begin(), d1.values().end(), 0.0);
  CHECK(zeros > 0.25 * d1.numel());
  CHECK(zeros < 0.35 * d1.numel());

  CHECK_THROWS_AS(enc.forward(Tensor::zeros({4, 30}), Accent::AM, eval), ShapeError);
  CHECK_THROWS_AS(enc.forward(char_frames(225, 1), Accent::AM, eval), ShapeError);
  for (int t : {1, 7, 56, 224}) CHECK(enc.forward(char_frames(t, 1), Accent::SP, eval).dim(0) == t);
}

TEST_CASE("pronunciation encoder: attention is full-context") {
  std::mt19937_64 rng(4);
  PronunciationEncoder enc(small_pron(), rng);
  nn::ForwardContext eval;
  Tensor chars = char_frames(12, 5);
  Tensor base = enc.forward(chars, Accent::MA, eval);
  for (int perturbed : {0, 5, 11}) {
    Tensor c2 = chars.clone();
    c2.mutable_values()[static_cast<std::size_t>(perturbed * 29 + 3)] += 0.1;
    Tensor out = enc.forward(c2, Accent::MA, eval);
    for (int r = 0; r < 12; ++r) {
      double diff = 0;
      for (int c = 0; c < 16; ++c) diff += std::abs(out.values()[static_cast<std::size_t>(r * 16 + c)] - base.values()[static_cast<std::size_t>(r * 16 + c)]);
      CHECK(diff > 1e-6);
    }
  }
}

TEST_CASE("pronunciation encoder gradients, including the accent table") {
  std::mt19937_64 rng(5);
  PronunciationEncoder enc(small_pron(), rng);
  nn::ParameterSet ps;
  enc.collect(ps);
  Tensor chars = char_frames(8, 6);
  chars.set_requires_grad(true);
  Tensor w = testing::random_tensor({8, 16}, rng, 1.0, false);
  nn::ForwardContext eval;
  auto loss = [&] { return ops::sum(ops::mul(enc.forward(chars, Accent::AR, eval), w)); };
  std::vector<Tensor> params{chars};
  for (auto& [name, t] : ps.items()) params.push_back(t);
  auto r = testing::check_gradients(loss, params, 1e-5, 6);
  CHECK(r.max_rel_error < 1e-3);

  // Accent sensitivity: d loss / d (own accent row) is nonzero.
  Tensor table = ps.items().front().second;
  table.zero_grad();
  loss().backward();
  double norm = 0;
  for (int c = 0; c < 8; ++c) norm += std::abs(table.grad()[static_cast<std::size_t>(accent_index(Accent::AR) * 8 + c)]);
  CHECK(norm > 0);
}

TEST_CASE("mean_pool") {
  Tensor a = Tensor::from({1, 3, 3, 5}, {2, 2});
  Tensor m = mean_pool(a);
  CHECK(m.values()[0] == 2.0);
  CHECK(m.values()[1] == 4.0);
  Tensor one = Tensor::from({0.1, -2.5, 7}, {1, 3});
  CHECK(std::equal(one.values().begin(), one.values().end(), mean_pool(one).values().begin()));
  CHECK_THROWS_AS(mean_pool(Tensor::zeros({0, 3})), InvalidArgument);

  std::mt19937_64 rng(6);
  Tensor x = testing::random_tensor({37, 5}, rng, 10.0, false);
  Tensor ref = mean_pool(x);
  std::vector<int> perm(37);
  for (int i = 0; i < 37; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Scalar> v;
    for (int r : perm)
      for (int c = 0; c < 5; ++c) v.push_back(x.values()[static_cast<std::size_t>(r * 5 + c)]);
    Tensor p = mean_pool(Tensor::from(v, {37, 5}));
    CHECK(std::equal(ref.values().begin(), ref.values().end(), p.values().begin()));
  }
  Tensor g = testing::random_tensor({6, 4}, rng);
  auto rep = testing::check_gradients([&] { return ops::sum(ops::square(mean_pool(g))); }, {g}, 1e-6, 0);
  CHECK(rep.max_rel_error < 1e-6);
}

TEST_CASE("acoustic encoder: any length maps to one 256-vector") {
  std::mt19937_64 rng(7);
  AcousticEncoder enc(AcousticConfig{}, rng);
  for (int t : {1, 8, 56, 224}) {
    Tensor f = testing::random_tensor({t, 14}, rng, 1.0, false);
    Tensor z = enc.forward(f);
    CHECK(z.shape() == Shape{256});
    CHECK(l2_diff(enc.forward(f), z) == 0.0);
    for (double v : z.values()) CHECK(std::isfinite(v));
  }
  CHECK_THROWS_AS(enc.forward(Tensor::zeros({0, 14})), InvalidArgument);
  CHECK_THROWS_AS(enc.forward(Tensor::zeros({5, 13})), ShapeError);
}

TEST_CASE("acoustic encoder gradients on an 8 x 14 input") {
  std::mt19937_64 rng(8);
  AcousticEncoder enc(small_acoustic(), rng);
  nn::ParameterSet ps;
  enc.collect(ps);
  Tensor f = testing::random_tensor({8, 14}, rng);
  Tensor w = testing::random_tensor({16}, rng, 1.0, false);
  auto loss = [&] { return ops::sum(ops::mul(enc.forward(f), w)); };
  std::vector<Tensor> params{f};
  for (auto& [name, t] : ps.items()) params.push_back(t);
  CHECK(testing::check_gradients(loss, params, 1e-5, 6).max_rel_error < 1e-3);
}

TEST_CASE("accent discriminator: range, determinism, local smoothness") {
  std::mt19937_64 rng(9);
  AccentDiscriminator d(256, AdversaryConfig{}, rng);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor z = testing::random_tensor({256}, rng, 5.0, false);
    const double p = d.forward(z).item();
    CHECK(p > 0);
    CHECK(p < 1);
    CHECK(d.forward(z).item() == p);
    Tensor dz = testing::random_tensor({256}, rng, 1.0, false);
    double norm = 0;
    for (double v : dz.values()) norm += v * v;
    Tensor z2 = ops::add(z, ops::scale(dz, 1e-8 / std::sqrt(norm)));
    CHECK(std::abs(d.forward(z2).item() - p) < 1e-6);
  }
  CHECK_THROWS_AS(d.forward(Tensor::zeros({2, 256})), ShapeError);
}

TEST_CASE("accent losses: closed forms") {
  auto probs = [](std::vector<double> v) {
    std::vector<Tensor> out;
    for (double x : v) out.push_back(Tensor::from({x}, {1}));
    return out;
  };
  CHECK(std::abs(loss_accent_discriminator(probs({1.0, 1.0, 0.0}), {true, true, false}).value.item()) < 1e-6);
  CHECK(std::abs(loss_accent_discriminator(probs({0.5, 0.5}), {true, false}).value.item() - 2 * std::log(2.0)) < 1e-6);
  CHECK(std::abs(loss_accent_discriminator(probs({0.9, 0.2}), {true, false}).value.item() - 0.3285) < 1e-4);
  CHECK(std::abs(loss_accent_discriminator(probs({0.9, 0.2}), {true, false}).value.item() -
                 (-std::log(0.9) - std::log(0.8))) < 1e-12);
  CHECK(std::abs(loss_accent_adversarial(probs({1.0, 1.0}), {false, false}).value.item()) < 1e-6);
  CHECK(std::abs(loss_accent_adversarial(probs({0.5}), {false}).value.item() - std::log(2.0)) < 1e-6);
  CHECK(std::abs(loss_accent_adversarial(probs({0.25, 0.5}), {false, false}).value.item() - 1.0397) < 1e-4);

  auto only_native = loss_accent_discriminator(probs({0.5, 0.5}), {true, true});
  CHECK(only_native.missing_foreign);
  CHECK(std::abs(only_native.value.item() - std::log(2.0)) < 1e-12);
  auto adv_none = loss_accent_adversarial(probs({0.3}), {true});
  CHECK(adv_none.missing_foreign);
  CHECK(adv_none.value.item() == 0.0);
  CHECK_THROWS_AS(loss_accent_discriminator({}, {}), InvalidArgument);
  CHECK_THROWS_AS(loss_accent_adversarial(probs({0.3}), {}), InvalidArgument);
}

TEST_CASE("accent losses agree with the scalar oracle; adversarial gradient pushes AD up") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int b = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<Tensor> p;
    oracle::Vec pv;
    std::vector<bool> native;
    for (int i = 0; i < b; ++i) {
      const double v = unit(rng);
      p.push_back(Tensor::from({v}, {1}, true));
      pv.push_back(v);
      native.push_back(unit(rng) < 0.5);
    }
    CHECK(std::abs(loss_accent_discriminator(p, native).value.item() - oracle::l_ad(pv, native)) < 1e-6);
    auto adv = loss_accent_adversarial(p, native);
    CHECK(std::abs(adv.value.item() - oracle::l_ad_adv(pv, native)) < 1e-6);
    adv.value.backward();
    for (int i = 0; i < b; ++i) {
      if (native[static_cast<std::size_t>(i)]) continue;
      CHECK(p[static_cast<std::size_t>(i)].grad()[0] < 0);
      // Finite-difference direction check.
      oracle::Vec hi = pv;
      hi[static_cast<std::size_t>(i)] += 1e-6;
      CHECK(oracle::l_ad_adv(hi, native) < oracle::l_ad_adv(pv, native));
    }
  }
}
