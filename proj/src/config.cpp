// src/config.cpp

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

#include "polyaccent/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "polyaccent/errors.hpp"

namespace polyaccent {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> split_ints(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      while (used < item.size() && item[used] == ' ') ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": '" + s + "' is not a list of integers");
    }
  }
  return out;
}

// Shortest text that reads back to the same double.
std::string fmt_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// One schema entry: how to read a key into the config and how to print it.
struct Field {
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <typename T>
T parse_scalar(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(key + ": expected true/false, got '" + s + "'");
  } else {
    is >> v;
    if (is.fail() || !is.eof()) throw ConfigError(key + ": cannot parse '" + s + "'");
  }
  return v;
}

template <typename T>
std::string print_scalar(const T& v) {
  if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
  else if constexpr (std::is_floating_point_v<T>) return fmt_double(v);
  else return std::to_string(v);
}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    auto scalar = [&f](const std::string& key, auto member) {
      f[key] = Field{[key, member](Config& c, const std::string& s) {
                       auto& ref = member(c);
                       ref = parse_scalar<std::decay_t<decltype(ref)>>(key, s);
                     },
                     [member](const Config& c) {
                       return print_scalar(member(const_cast<Config&>(c)));
                     }};
    };
    auto list = [&f](const std::string& key, auto member) {
      f[key] = Field{[key, member](Config& c, const std::string& s) { member(c) = split_ints(key, s); },
                     [member](const Config& c) { return join(member(const_cast<Config&>(c))); }};
    };
    auto text = [&f](const std::string& key, auto member) {
      f[key] = Field{[member](Config& c, const std::string& s) { member(c) = s; },
                     [member](const Config& c) { return std::string(member(const_cast<Config&>(c))); }};
    };

    text("frontend.kind", [](Config& c) -> std::string& { return c.frontend.kind; });
    f["frontend.cache_dir"] = Field{[](Config& c, const std::string& s) { c.frontend.cache_dir = s; },
                                    [](const Config& c) { return c.frontend.cache_dir.string(); }};
    text("frontend.vocab", [](Config& c) -> std::string& { return c.frontend.vocab; });
    scalar("frontend.one_hot", [](Config& c) -> bool& { return c.frontend.one_hot; });
    scalar("frontend.seed", [](Config& c) -> std::uint64_t& { return c.frontend.seed; });

    scalar("pronunciation.accent_dim", [](Config& c) -> int& { return c.pronunciation.accent_dim; });
    scalar("pronunciation.d_model", [](Config& c) -> int& { return c.pronunciation.d_model; });
    scalar("pronunciation.layers", [](Config& c) -> int& { return c.pronunciation.layers; });
    scalar("pronunciation.heads", [](Config& c) -> int& { return c.pronunciation.heads; });
    scalar("pronunciation.ff_dim", [](Config& c) -> int& { return c.pronunciation.ff_dim; });
    scalar("pronunciation.max_positions", [](Config& c) -> int& { return c.pronunciation.max_positions; });
    scalar("pronunciation.dropout", [](Config& c) -> double& { return c.pronunciation.dropout; });

    list("acoustic.widths", [](Config& c) -> std::vector<int>& { return c.acoustic.widths; });
    list("acoustic.kernels", [](Config& c) -> std::vector<int>& { return c.acoustic.kernels; });
    list("acoustic.dilations", [](Config& c) -> std::vector<int>& { return c.acoustic.dilations; });
    scalar("acoustic.attention_heads", [](Config& c) -> int& { return c.acoustic.attention_heads; });
    scalar("acoustic.slope", [](Config& c) -> double& { return c.acoustic.slope; });

    scalar("adversary.enabled", [](Config& c) -> bool& { return c.adversary.enabled; });
    scalar("adversary.hidden", [](Config& c) -> int& { return c.adversary.hidden; });
    scalar("adversary.warmup_steps", [](Config& c) -> int& { return c.adversary.warmup_steps; });
    scalar("adversary.lambda", [](Config& c) -> double& { return c.adversary.lambda; });
    scalar("adversary.eps", [](Config& c) -> double& { return c.adversary.eps; });

    scalar("generator.base_width", [](Config& c) -> int& { return c.generator.base_width; });
    scalar("generator.min_width", [](Config& c) -> int& { return c.generator.min_width; });
    scalar("generator.pre_kernel", [](Config& c) -> int& { return c.generator.pre_kernel; });
    list("generator.rates", [](Config& c) -> std::vector<int>& { return c.generator.rates; });
    list("generator.up_kernels", [](Config& c) -> std::vector<int>& { return c.generator.up_kernels; });
    list("generator.resblock_kernels", [](Config& c) -> std::vector<int>& { return c.generator.resblock_kernels; });
    list("generator.resblock_dilations", [](Config& c) -> std::vector<int>& { return c.generator.resblock_dilations; });
    scalar("generator.post_kernel", [](Config& c) -> int& { return c.generator.post_kernel; });
    scalar("generator.slope", [](Config& c) -> double& { return c.generator.slope; });
    scalar("generator.init_std", [](Config& c) -> double& { return c.generator.init_std; });

    list("discriminator.periods", [](Config& c) -> std::vector<int>& { return c.discriminator.periods; });
    list("discriminator.mpd_channels", [](Config& c) -> std::vector<int>& { return c.discriminator.mpd_channels; });
    scalar("discriminator.mpd_kernel", [](Config& c) -> int& { return c.discriminator.mpd_kernel; });
    scalar("discriminator.mpd_stride", [](Config& c) -> int& { return c.discriminator.mpd_stride; });
    scalar("discriminator.msd_scales", [](Config& c) -> int& { return c.discriminator.msd_scales; });
    list("discriminator.msd_channels", [](Config& c) -> std::vector<int>& { return c.discriminator.msd_channels; });
    list("discriminator.msd_kernels", [](Config& c) -> std::vector<int>& { return c.discriminator.msd_kernels; });
    list("discriminator.msd_strides", [](Config& c) -> std::vector<int>& { return c.discriminator.msd_strides; });
    scalar("discriminator.slope", [](Config& c) -> double& { return c.discriminator.slope; });
    scalar("discriminator.min_samples", [](Config& c) -> int& { return c.discriminator.min_samples; });

    scalar("training.lr", [](Config& c) -> double& { return c.training.lr; });
    scalar("training.lr_decay", [](Config& c) -> double& { return c.training.lr_decay; });
    scalar("training.decay_every", [](Config& c) -> int& { return c.training.decay_every; });
    scalar("training.beta1", [](Config& c) -> double& { return c.training.beta1; });
    scalar("training.beta2", [](Config& c) -> double& { return c.training.beta2; });
    scalar("training.adam_eps", [](Config& c) -> double& { return c.training.adam_eps; });
    scalar("training.weight_decay", [](Config& c) -> double& { return c.training.weight_decay; });
    scalar("training.grad_clip", [](Config& c) -> double& { return c.training.grad_clip; });
    scalar("training.batch", [](Config& c) -> int& { return c.training.batch; });
    scalar("training.total_steps", [](Config& c) -> int& { return c.training.total_steps; });
    scalar("training.seed", [](Config& c) -> std::uint64_t& { return c.training.seed; });
    scalar("training.lambda_mel", [](Config& c) -> double& { return c.training.lambda_mel; });
    scalar("training.lambda_fm", [](Config& c) -> double& { return c.training.lambda_fm; });
    scalar("training.lambda_hd", [](Config& c) -> double& { return c.training.lambda_hd; });
    scalar("training.segment_samples", [](Config& c) -> int& { return c.training.segment_samples; });
    scalar("training.checkpoint_every", [](Config& c) -> int& { return c.training.checkpoint_every; });
    return f;
  }();
  return fields;
}

}  // namespace

void Config::finalize() {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  const CharVocab vocab(frontend.vocab);
  pronunciation.vocab_size = vocab.size();
  generator.input_dim = pronunciation.d_model + acoustic.embedding_dim() + 1;
  require(frontend.kind == "cached" || frontend.kind == "synthetic",
          "frontend.kind must be 'cached' or 'synthetic'");
  require(training.lr > 0 && training.lr_decay > 0 && training.decay_every > 0,
          "training.lr, lr_decay and decay_every must be positive");
  require(training.batch > 0 && training.total_steps > 0, "training.batch and total_steps must be positive");
  require(adversary.warmup_steps >= 0 && adversary.warmup_steps <= training.total_steps,
          "adversary.warmup_steps must lie in [0, training.total_steps]");
  require(training.lambda_mel >= 0 && training.lambda_fm >= 0 && training.lambda_hd >= 0 && adversary.lambda >= 0,
          "loss weights must be non-negative");
  require(training.segment_samples > 0 && training.segment_samples % kCharHopSamples == 0,
          "training.segment_samples must be a positive multiple of " + std::to_string(kCharHopSamples));
  require(training.segment_samples >= discriminator.min_samples,
          "training.segment_samples is shorter than discriminator.min_samples");
  require(training.segment_samples / kHopSamples <= pronunciation.max_positions * kCharUpsample,
          "training.segment_samples exceeds pronunciation.max_positions");
  require(pronunciation.dropout >= 0 && pronunciation.dropout < 1, "pronunciation.dropout must lie in [0, 1)");
  for (const auto& [name, w] : subset_weights)
    require(w > 0, "weights." + name + " must be positive");
}

Config desk_config() {
  Config c;
  c.finalize();
  return c;
}

Config paper_config() {
  Config c;
  c.training.total_steps = 3'000'000;
  c.training.batch = 16;
  c.adversary.warmup_steps = 50'000;
  c.finalize();
  return c;
}

Config tiny_config() {
  Config c;
  c.pronunciation.accent_dim = 16;
  c.pronunciation.d_model = 32;
  c.pronunciation.layers = 2;
  c.pronunciation.heads = 2;
  c.pronunciation.ff_dim = 64;
  c.acoustic.widths = {16, 16, 32, 32};
  c.acoustic.attention_heads = 2;
  c.adversary.hidden = 16;
  c.adversary.warmup_steps = 100;
  c.generator.base_width = 32;
  c.generator.min_width = 4;
  c.discriminator.mpd_channels = {4, 8, 16, 16};
  c.discriminator.msd_channels = {4, 8, 8, 16, 16, 16};
  c.training.lr = 2e-3;
  c.training.batch = 2;
  c.training.total_steps = 2000;
  c.training.segment_samples = 2560;
  c.training.checkpoint_every = 500;
  c.finalize();
  return c;
}

Config parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  bool weights_given = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' must live inside a [section]");
    if (section == "weights") {
      if (!weights_given) c.subset_weights.clear();
      weights_given = true;
      for (const auto& [name, value] : body)
        c.subset_weights[name] = parse_scalar<double>("weights." + name, value.data());
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = schema().find(full);
      if (it == schema().end()) throw ConfigError("config: unknown key '" + full + "'");
      it->second.set(c, value.data());
    }
  }
  c.finalize();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& config) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  for (const auto& [full, field] : schema()) {
    const auto dot = full.find('.');
    sections[full.substr(0, dot)][full.substr(dot + 1)] = field.get(config);
  }
  for (const auto& [name, w] : config.subset_weights) sections["weights"][name] = fmt_double(w);
  std::ostringstream os;
  for (const auto& [section, keys] : sections) {
    os << "[" << section << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v << "\n";
    os << "\n";
  }
  return os.str();
}

}  // namespace polyaccent
