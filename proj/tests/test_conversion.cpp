// tests/test_conversion.cpp

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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "polyaccent/conversion.hpp"
#include "polyaccent/errors.hpp"
#include "polyaccent/features.hpp"
#include "polyaccent/fixtures.hpp"

using namespace polyaccent;
namespace fs = std::filesystem;

#ifndef POLYACCENT_CLI
#define POLYACCENT_CLI "polyaccent"
#endif

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("polyaccent_conversion_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

LoadedModel tiny_model() {
  Config c = tiny_config();
  Model m(c, 5);
  return LoadedModel{c, std::move(m), 0};
}

double mel_l1(const Waveform& a, const Waveform& b) {
  const auto ma = mel_spectrogram(a).frames, mb = mel_spectrogram(b).frames;
  double s = 0;
  for (std::size_t i = 0; i < ma.data.size(); ++i) s += std::abs(ma.data[i] - mb.data[i]);
  return s / static_cast<double>(ma.data.size());
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(POLYACCENT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("conversion keeps the sample count and is deterministic") {
  const LoadedModel m = tiny_model();
  SyntheticProvider provider(CharVocab{}, 1);
  for (int n : {1, 319, 2560, 2561, 5000, 35840}) {
    Waveform w = synth_harmonic(150, 900, 1.0, 0.3, 1);
    w.samples.resize(static_cast<std::size_t>(n));
    CHECK(convert_waveform(m, w, Accent::HI, provider, "x").size() == static_cast<std::size_t>(n));
  }
  const Waveform w = synth_harmonic(150, 900, 0.5, 0.3, 1);
  const Waveform a = convert_waveform(m, w, Accent::HI, provider, "x");
  const Waveform b = convert_waveform(m, w, Accent::HI, provider, "x");
  CHECK(a.samples == b.samples);
  // Same input, different accent IDs -> different output.
  const Waveform c = convert_waveform(m, w, Accent::KO, provider, "x");
  CHECK(mel_l1(a, c) > 0);
  // The source's own accent is a legal target.
  CHECK(convert_waveform(m, w, Accent::AM, provider, "x").size() == w.size());
  CHECK_THROWS_AS(convert_waveform(m, Waveform{}, Accent::AM, provider, "x"), InvalidArgument);
}

TEST_CASE("convert reads a checkpoint and writes the output atomically") {
  const fs::path dir = scratch("single");
  write_checkpoint(dir / "model.bin", initial_checkpoint(tiny_config()));
  const Waveform w = synth_harmonic(200, 1200, 2.24, 0.3, 3);
  write_wav(dir / "in.wav", w);
  ConversionRequest req{dir / "in.wav", Accent::HI, dir / "model.bin", dir / "out" / "in.HI.wav"};
  convert(req);
  CHECK(fs::exists(req.output_path));
  CHECK_FALSE(fs::exists(req.output_path.string() + ".tmp"));
  const Waveform out = read_wav(req.output_path);
  CHECK(out.size() == 35840);
  const std::string first = [&] {
    std::ifstream in(req.output_path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  convert(req);
  std::ifstream in(req.output_path, std::ios::binary);
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == first);

  InferenceOptions cached;
  cached.frontend = FrontendConfig{};
  cached.frontend->kind = "cached";
  cached.frontend->cache_dir = dir / "no-cache";
  CHECK_THROWS_AS(convert(req, cached), FrontendUnavailable);

  // A checkpoint whose tensors disagree with its own config.
  Checkpoint ck = read_checkpoint(dir / "model.bin");
  Config other = tiny_config();
  other.adversary.hidden = 24;
  other.finalize();
  ck.config_text = serialize_config(other);
  write_checkpoint(dir / "bad.bin", ck);
  req.checkpoint_path = dir / "bad.bin";
  CHECK_THROWS_AS(convert(req), VersionError);
}

TEST_CASE("batch conversion collects per-item failures") {
  const fs::path dir = scratch("batch");
  FixtureSpec spec;
  spec.clips_per_accent = 1;
  spec.seconds = 0.2;
  spec.accents = {Accent::AM, Accent::AR, Accent::BR, Accent::HI, Accent::KO};
  make_fixture_corpus(dir / "corpus", spec);
  std::ofstream(dir / "corpus" / "wav" / "BR_0.wav") << "not a wav file";
  write_checkpoint(dir / "model.bin", initial_checkpoint(tiny_config()));

  const auto report = batch_convert(dir / "corpus" / "manifest.jsonl", {Accent::AM, Accent::HI, Accent::KO},
                                    dir / "model.bin", dir / "out");
  CHECK(report.outputs.size() == 12);
  CHECK(report.failures.size() == 3);
  for (const auto& f : report.failures) CHECK(f.clip.find("BR_0") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "AM_0.HI.wav"));
  CHECK(fs::exists(dir / "out" / "KO_0.KO.wav"));
  CHECK(read_wav(dir / "out" / "AR_0.AM.wav").size() == 3200);

  CHECK(batch_convert(dir / "corpus" / "manifest.jsonl", {}, dir / "model.bin", dir / "none").outputs.empty());
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string d = dir.string();
  CHECK(run_cli("") == 2);
  CHECK(run_cli("init-checkpoint --profile tiny --output " + d + "/m.bin") == 0);
  CHECK(run_cli("make-fixtures --out-dir " + d + "/fx --clips-per-accent 1 --seconds 0.2") == 0);
  CHECK(fs::exists(dir / "fx" / "manifest.jsonl"));
  const std::string in = d + "/fx/wav/KO_0.wav";
  CHECK(run_cli("convert --input " + in + " --accent HI --checkpoint " + d + "/m.bin --output " + d + "/o.wav") == 0);
  CHECK(read_wav(dir / "o.wav").size() == read_wav(in).size());
  CHECK(run_cli("convert --input " + in + " --accent XX --checkpoint " + d + "/m.bin --output " + d + "/o.wav") == 2);
  CHECK(run_cli("convert --input " + in + " --accent HI --checkpoint " + d + "/m.bin --output " + d +
                "/o.wav --frontend cached --cache-dir " + d + "/nothing") == 1);
  CHECK(run_cli("convert-batch --manifest " + d + "/fx/manifest.jsonl --accents AM,HI --checkpoint " + d +
                "/m.bin --out-dir " + d + "/batch") == 0);
  CHECK(fs::exists(dir / "batch" / "VI_0.AM.wav"));
  CHECK(run_cli("train --profile tiny --manifest " + d + "/fx/manifest.jsonl --out-dir " + d + "/run --steps 2") == 0);
  CHECK(fs::exists(dir / "run" / "final.bin"));
  CHECK(fs::exists(dir / "run" / "loss.csv"));
  CHECK(run_cli("train --profile tiny --manifest " + d + "/fx/manifest.jsonl --out-dir " + d + "/run --steps 3 --resume " +
                d + "/run/final.bin") == 0);
  CHECK(read_checkpoint(dir / "run" / "final.bin").iteration == 3);
  std::ofstream(dir / "fx" / "wav" / "SP_0.wav") << "broken";
  CHECK(run_cli("convert-batch --manifest " + d + "/fx/manifest.jsonl --accents AM --checkpoint " + d +
                "/m.bin --out-dir " + d + "/batch2") == 1);
  std::ofstream(dir / "bad.ini") << "[training]\nbogus = 1\n";
  CHECK(run_cli("init-checkpoint --config " + d + "/bad.ini --output " + d + "/x.bin") == 2);
}
