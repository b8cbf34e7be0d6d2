// tools/polyaccent.cpp

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

// Command-line front end: training, checkpoint creation, fixtures and accent
// conversion.

#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "polyaccent/conversion.hpp"
#include "polyaccent/errors.hpp"
#include "polyaccent/fixtures.hpp"

namespace fs = std::filesystem;
using namespace polyaccent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitItemFailures = 1;
constexpr int kExitUsage = 2;

struct FrontendFlags {
  std::string kind;
  std::string cache_dir;

  InferenceOptions options() const {
    InferenceOptions o;
    if (!kind.empty() || !cache_dir.empty()) {
      FrontendConfig f;
      f.kind = kind.empty() ? "cached" : kind;
      f.cache_dir = cache_dir;
      if (f.kind != "cached" && f.kind != "synthetic") throw ConfigError("--frontend must be 'cached' or 'synthetic'");
      o.frontend = f;
    }
    return o;
  }
};

void add_frontend_flags(CLI::App* app, FrontendFlags& f) {
  app->add_option("--frontend", f.kind, "Character provider: cached or synthetic")
      ->check(CLI::IsMember({"cached", "synthetic"}));
  app->add_option("--cache-dir", f.cache_dir, "Directory of <clip>.feat prediction files");
}

Config config_from(const std::string& path, const std::string& profile) {
  if (!path.empty()) return load_config(path);
  if (profile == "paper") return paper_config();
  if (profile == "tiny") return tiny_config();
  return desk_config();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voice-preserving accent conversion"};
  app.require_subcommand(1);

  ConversionRequest req;
  std::string accent_code_in;
  FrontendFlags conv_frontend;
  auto* conv = app.add_subcommand("convert", "Convert one WAV to a target accent");
  conv->add_option("--input", req.input_path, "Input WAV")->required();
  conv->add_option("--accent", accent_code_in, "Target accent (AM AR BR HI KO MA SP VI)")->required();
  conv->add_option("--checkpoint", req.checkpoint_path, "Checkpoint file")->required();
  conv->add_option("--output", req.output_path, "Output WAV")->required();
  add_frontend_flags(conv, conv_frontend);

  fs::path batch_manifest, batch_ckpt, batch_out;
  std::string batch_accents;
  FrontendFlags batch_frontend;
  auto* batch = app.add_subcommand("convert-batch", "Convert every manifest clip to each accent");
  batch->add_option("--manifest", batch_manifest, "JSON-lines manifest")->required();
  batch->add_option("--accents", batch_accents, "Comma-separated accents, e.g. AM,HI,KO")->required();
  batch->add_option("--checkpoint", batch_ckpt, "Checkpoint file")->required();
  batch->add_option("--out-dir", batch_out, "Output directory")->required();
  add_frontend_flags(batch, batch_frontend);

  std::string train_config, train_profile = "desk";
  fs::path train_manifest, train_out, train_resume;
  long long train_steps = -1;
  auto* train = app.add_subcommand("train", "Train from a manifest");
  train->add_option("--config", train_config, "INI configuration file");
  train->add_option("--profile", train_profile, "Built-in profile when --config is absent")
      ->check(CLI::IsMember({"desk", "paper", "tiny"}));
  train->add_option("--manifest", train_manifest, "JSON-lines manifest")->required();
  train->add_option("--out-dir", train_out, "Directory for loss.csv and checkpoints")->required();
  train->add_option("--steps", train_steps, "Stop at this iteration (default: training.total_steps)");
  train->add_option("--resume", train_resume, "Checkpoint to resume from");

  std::string init_config, init_profile = "desk";
  fs::path init_out;
  auto* init = app.add_subcommand("init-checkpoint", "Write an untrained checkpoint");
  init->add_option("--config", init_config, "INI configuration file");
  init->add_option("--profile", init_profile, "Built-in profile when --config is absent")
      ->check(CLI::IsMember({"desk", "paper", "tiny"}));
  init->add_option("--output", init_out, "Checkpoint path")->required();

  std::string show_config, show_profile = "desk";
  auto* show = app.add_subcommand("show-config", "Print a full configuration as INI");
  show->add_option("--config", show_config, "INI configuration file");
  show->add_option("--profile", show_profile, "Built-in profile when --config is absent")
      ->check(CLI::IsMember({"desk", "paper", "tiny"}));

  fs::path fix_dir;
  FixtureSpec fix_spec;
  auto* fix = app.add_subcommand("make-fixtures", "Write a synthetic harmonic corpus and manifest");
  fix->add_option("--out-dir", fix_dir, "Output directory")->required();
  fix->add_option("--clips-per-accent", fix_spec.clips_per_accent, "Clips per accent")->check(CLI::PositiveNumber);
  fix->add_option("--seconds", fix_spec.seconds, "Clip duration")->check(CLI::PositiveNumber);
  fix->add_option("--seed", fix_spec.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*conv) {
      req.target_accent = parse_accent(accent_code_in);
      convert(req, conv_frontend.options());
      return kExitOk;
    }
    if (*batch) {
      const auto report = batch_convert(batch_manifest, parse_accent_list(batch_accents), batch_ckpt, batch_out,
                                        batch_frontend.options());
      std::printf("%zu outputs, %zu failures\n", report.outputs.size(), report.failures.size());
      for (const auto& f : report.failures)
        std::printf("FAILED %s -> %s: %s\n", f.clip.c_str(), f.accent.c_str(), f.message.c_str());
      return report.failures.empty() ? kExitOk : kExitItemFailures;
    }
    if (*train) {
      Config config = config_from(train_config, train_profile);
      if (!train_resume.empty()) {
        // The run continues under the checkpoint's own configuration.
        config = parse_config(read_checkpoint(train_resume).config_text);
      }
      fs::create_directories(train_out);
      Trainer trainer(config, load_dataset(read_manifest(train_manifest), config));
      if (!train_resume.empty()) trainer.load_checkpoint(train_resume);
      LossLog log(train_out / "loss.csv");
      const long long until = train_steps >= 0 ? train_steps : config.training.total_steps;
      while (trainer.iteration() < until) {
        trainer.run(std::min(until, trainer.iteration() + 100), &log, train_out);
        spdlog::info("iteration {}", trainer.iteration());
      }
      trainer.save_checkpoint(train_out / "final.bin");
      return kExitOk;
    }
    if (*init) {
      write_checkpoint(init_out, initial_checkpoint(config_from(init_config, init_profile)));
      return kExitOk;
    }
    if (*show) {
      std::fputs(serialize_config(config_from(show_config, show_profile)).c_str(), stdout);
      return kExitOk;
    }
    if (*fix) {
      const auto entries = make_fixture_corpus(fix_dir, fix_spec);
      std::printf("%zu clips written to %s\n", entries.size(), fix_dir.c_str());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitItemFailures;
  }
  return kExitUsage;
}
