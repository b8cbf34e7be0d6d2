// src/training.cpp

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

#include "polyaccent/training.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstring>
#include <exception>
#include <sstream>

#include "json.hpp"
#include "polyaccent/errors.hpp"
#include "polyaccent/features.hpp"
#include "polyaccent/ops.hpp"

namespace polyaccent {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ------------------------------------------------------------ manifest

std::vector<ManifestEntry> read_manifest(const fs::path& path, bool require_files) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    ManifestEntry e;
    try {
      e.path = j.at("path").get<std::string>();
      e.accent = parse_accent(j.at("accent").get<std::string>());
      e.subset = j.at("subset").get<std::string>();
      e.duration_s = j.at("duration_s").get<double>();
      if (j.contains("text")) e.text = j.at("text").get<std::string>();
    } catch (const json::exception& ex) {
      throw FormatError(where + ": " + ex.what());
    } catch (const InvalidArgument& ex) {
      throw InvalidArgument(where + ": " + ex.what());
    }
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    if (require_files && !fs::exists(e.path)) throw FormatError(where + ": audio file " + e.path.string() + " not found");
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write manifest " + path.string());
  for (const auto& e : entries) {
    json j = {{"path", e.path.string()},
              {"accent", accent_code(e.accent)},
              {"subset", e.subset},
              {"duration_s", e.duration_s}};
    if (!e.text.empty()) j["text"] = e.text;
    out << j.dump() << "\n";
  }
}

std::string clip_id(const fs::path& path) { return path.stem().string(); }

// ------------------------------------------------------------ dataset

std::vector<Example> prepare_clip(const Waveform& wave, const std::string& id, Accent accent,
                                  const std::string& text, const CharProvider& provider,
                                  int segment_samples, bool one_hot) {
  if (wave.sample_rate != kSampleRate)
    throw InvalidArgument("prepare_clip: expected 16 kHz audio for clip '" + id + "'");
  std::vector<Example> out;
  const auto pieces = segment(wave, static_cast<double>(segment_samples) / kSampleRate);
  if (pieces.empty()) return out;
  CharPosteriorSequence chars = provider.predict(ClipRequest{id, &wave, text});
  if (one_hot) chars = to_one_hot(chars);
  const int char_rows = segment_samples / kCharHopSamples;
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    const Waveform& piece = pieces[s];
    Example ex;
    ex.clip_id = id;
    ex.accent = accent;
    ex.wave = Tensor::from(piece.samples, {static_cast<int>(piece.size())});
    ex.chars = slice_or_pad(chars, static_cast<int>(s) * char_rows, char_rows, provider.vocab()).frames.to_tensor();
    PitchTrack pitch = extract_pitch(piece);
    ex.acoustic = acoustic_frames(piece, pitch).to_tensor();
    ex.f0_hz = pitch.f0_hz;
    out.push_back(std::move(ex));
  }
  return out;
}

Dataset load_dataset(const std::vector<ManifestEntry>& entries, const Config& config) {
  if (entries.empty()) throw InvalidArgument("load_dataset: empty manifest");
  auto provider = make_provider(config.frontend);
  std::vector<std::vector<Example>> segs(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      Waveform w = resample(read_wav(entries[i].path), kSampleRate);
      segs[i] = prepare_clip(w, clip_id(entries[i].path), entries[i].accent, entries[i].text,
                             *provider, config.training.segment_samples, config.frontend.one_hot);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Dataset data;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (segs[i].empty()) {
      spdlog::warn("clip {} is shorter than half a segment; skipped", entries[i].path.string());
      continue;
    }
    data.entries.push_back(entries[i]);
    data.segments.push_back(std::move(segs[i]));
  }
  if (data.entries.empty()) throw InvalidArgument("load_dataset: no clip yields a training segment");
  return data;
}

// ------------------------------------------------------------ sampler

WeightedSampler::WeightedSampler(const std::vector<ManifestEntry>& entries,
                                 const std::map<std::string, double>& weights, std::uint64_t seed)
    : rng_(seed) {
  if (entries.empty()) throw InvalidArgument("WeightedSampler: empty manifest");
  double total = 0;
  for (const auto& e : entries) {
    auto it = weights.find(e.subset);
    if (it == weights.end()) throw ConfigError("no sampling weight for subset '" + e.subset + "'");
    if (!(it->second > 0)) throw ConfigError("sampling weight for subset '" + e.subset + "' must be positive");
    clip_weights_.push_back(it->second);
    total += it->second;
  }
  dist_ = std::discrete_distribution<std::size_t>(clip_weights_.begin(), clip_weights_.end());
  epoch_size_ = static_cast<std::size_t>(std::llround(total));
}

std::size_t WeightedSampler::next() { return dist_(rng_); }

std::string WeightedSampler::state() const {
  std::ostringstream os;
  os << rng_;
  return os.str();
}

void WeightedSampler::set_state(const std::string& state) {
  std::istringstream is(state);
  is >> rng_;
  if (is.fail()) throw CorruptFileError("sampler state is unreadable");
}

// ------------------------------------------------------------ optimization

double learning_rate(long long iteration, const TrainingConfig& c) {
  if (iteration < 0) throw InvalidArgument("learning_rate: negative iteration");
  return c.lr * std::pow(c.lr_decay, static_cast<double>(iteration / c.decay_every));
}

double clip_grad_norm(nn::ParameterSet& params, double max_norm) {
  double sq = 0;
  for (auto& [name, p] : params.items())
    for (Scalar g : p.grad()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / (norm + 1e-6);
    for (auto& [name, p] : params.items())
      for (Scalar& g : p.mutable_grad()) g *= s;
  }
  return norm;
}

AdamW::AdamW(nn::ParameterSet params, const TrainingConfig& c)
    : params_(std::move(params)), beta1_(c.beta1), beta2_(c.beta2), eps_(c.adam_eps),
      weight_decay_(c.weight_decay) {
  for (auto& [name, p] : params_.items()) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

void AdamW::step(double lr) {
  ++t_;
  const double bc1 = 1 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1 - std::pow(beta2_, static_cast<double>(t_));
  auto& items = params_.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    Tensor& p = items[i].second;
    auto g = p.mutable_grad();  // zeros for parameters the loss did not reach
    auto w = p.mutable_values();
    auto& m = m_[i];
    auto& v = v_[i];
    const auto n = static_cast<long long>(w.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long long j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      w[k] *= 1 - lr * weight_decay_;
      m[k] = beta1_ * m[k] + (1 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1 - beta2_) * g[k] * g[k];
      w[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps_);
    }
  }
}

// ------------------------------------------------------------ loss log

LossLog::LossLog(const fs::path& path) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw FormatError("cannot open loss log " + path.string());
  if (fresh) out_ << "iteration,L_mel,L_AD,L_AD_adv,L_HD,L_HD_adv,L_FM,lr\n";
}

void LossLog::append(const LossReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.iteration, r.l_mel,
                r.l_ad, r.l_ad_adv, r.l_hd, r.l_hd_adv, r.l_fm, r.lr);
  out_ << buf;
  out_.flush();
}

// ------------------------------------------------------------ trainer

namespace {

double checked(const char* term, const Tensor& t) {
  const double v = t.item();
  if (!std::isfinite(v)) throw NonFiniteLoss(term, v);
  return v;
}

Tensor batch_mean(const std::vector<Tensor>& xs) {
  return ops::scale(ops::add_n(xs), 1.0 / static_cast<double>(xs.size()));
}

}  // namespace

Trainer::Trainer(Config config, Dataset data)
    : config_(std::move(config)),
      data_(std::move(data)),
      model_(config_, config_.training.seed),
      gen_opt_(model_.generator_path(), config_.training),
      accent_opt_(model_.accent_discriminator(), config_.training),
      hifi_opt_(model_.hifi_discriminators(), config_.training),
      sampler_(data_.entries, config_.subset_weights, config_.training.seed ^ 0x5a17u),
      segment_rng_(config_.training.seed + 1),
      dropout_rng_(config_.training.seed + 2) {}

std::vector<const Example*> Trainer::sample_batch() {
  std::vector<const Example*> batch;
  for (int b = 0; b < config_.training.batch; ++b) {
    const auto& segs = data_.segments[sampler_.next()];
    std::uniform_int_distribution<std::size_t> pick(0, segs.size() - 1);
    batch.push_back(&segs[pick(segment_rng_)]);
  }
  return batch;
}

LossReport Trainer::step() { return train_step(sample_batch()); }

LossReport Trainer::train_step(const std::vector<const Example*>& batch) {
  if (batch.empty()) throw InvalidArgument("train_step: empty batch");
  const auto& tc = config_.training;
  LossReport report;
  report.iteration = iteration_;
  report.lr = learning_rate(iteration_, tc);
  const bool adversary = config_.adversary.enabled;
  report.adversarial_applied = adversary && iteration_ >= config_.adversary.warmup_steps;

  // Generator-path forward, reused by all three phases.
  nn::ForwardContext ctx{true, &dropout_rng_};
  std::vector<Tensor> fake, z;
  std::vector<bool> native;
  for (const Example* ex : batch) {
    auto out = synthesize(model_, ex->chars, ex->accent, ex->acoustic, ex->f0_hz, ctx);
    fake.push_back(out.wave);
    z.push_back(out.z);
    native.push_back(is_native(ex->accent));
  }
  nn::ParameterSet& gen_params = gen_opt_.params();
  nn::ParameterSet& accent_params = accent_opt_.params();
  nn::ParameterSet& hifi_params = hifi_opt_.params();
  auto zero_all = [&] {
    gen_params.zero_grad();
    accent_params.zero_grad();
    hifi_params.zero_grad();
  };

  // (a) MSD/MPD.
  {
    std::vector<std::vector<SubDiscriminatorOutput>> real_out, fake_out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      real_out.push_back(model_.hifi.forward(batch[i]->wave));
      fake_out.push_back(model_.hifi.forward(fake[i].detach()));
    }
    Tensor l_hd = loss_hifigan_discriminator(scores_of(real_out), scores_of(fake_out));
    report.l_hd = checked("L_HD", l_hd);
    zero_all();
    l_hd.backward();
    clip_grad_norm(hifi_params, tc.grad_clip);
    hifi_opt_.step(report.lr);
    zero_all();
  }
  if (observer_) observer_(Phase::kHifiDiscriminators);

  // (b) accent discriminator.
  if (adversary) {
    std::vector<Tensor> probs;
    for (const Tensor& zi : z) probs.push_back(model_.accent_disc.forward(zi.detach()));
    AccentLoss ad = loss_accent_discriminator(probs, native);
    if ((ad.missing_native || ad.missing_foreign) && single_class_batches_++ % 1000 == 0)
      spdlog::warn("iteration {}: accent discriminator batch has no {} items, that term is 0 ({} such batches so far)",
                   iteration_, ad.missing_native ? "native" : "foreign", single_class_batches_);
    Tensor l_ad = ad.value;
    report.l_ad = checked("L_AD", l_ad);
    zero_all();
    l_ad.backward();
    clip_grad_norm(accent_params, tc.grad_clip);
    accent_opt_.step(report.lr);
    zero_all();
  }
  if (observer_) observer_(Phase::kAccentDiscriminator);

  // (c) generator path.
  {
    std::vector<std::vector<SubDiscriminatorOutput>> real_out, fake_out;
    std::vector<Tensor> mel;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      {
        NoGradGuard guard;
        real_out.push_back(model_.hifi.forward(batch[i]->wave));
      }
      fake_out.push_back(model_.hifi.forward(fake[i]));
      mel.push_back(loss_mel(batch[i]->wave, fake[i]));
    }
    Tensor l_mel = batch_mean(mel);
    Tensor l_hd_adv = loss_hifigan_adversarial(scores_of(fake_out));
    Tensor l_fm = loss_feature_matching(features_of(real_out), features_of(fake_out));
    report.l_mel = checked("L_mel", l_mel);
    report.l_hd_adv = checked("L_HD_adv", l_hd_adv);
    report.l_fm = checked("L_FM", l_fm);
    std::vector<Tensor> terms{ops::scale(l_mel, tc.lambda_mel), ops::scale(l_hd_adv, tc.lambda_hd),
                              ops::scale(l_fm, tc.lambda_fm)};
    if (adversary) {
      std::vector<Tensor> probs;
      for (const Tensor& zi : z) probs.push_back(model_.accent_disc.forward(zi));
      Tensor l_adv = loss_accent_adversarial(probs, native).value;
      report.l_ad_adv = checked("L_AD_adv", l_adv);
      if (report.adversarial_applied) terms.push_back(ops::scale(l_adv, config_.adversary.lambda));
    }
    Tensor total = ops::add_n(terms);
    checked("L_gen", total);
    zero_all();
    total.backward();
    clip_grad_norm(gen_params, tc.grad_clip);
    gen_opt_.step(report.lr);
    zero_all();
  }
  if (observer_) observer_(Phase::kGenerator);
  ++iteration_;
  return report;
}

void Trainer::run(long long until, LossLog* log, const fs::path& ckpt_dir) {
  while (iteration_ < until) {
    LossReport r = step();
    if (log) log->append(r);
    if (!ckpt_dir.empty() && iteration_ % config_.training.checkpoint_every == 0)
      save_checkpoint(ckpt_dir / ("ckpt_" + std::to_string(iteration_) + ".bin"));
  }
}

namespace {

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void set_rng_state(std::mt19937_64& rng, const std::string& s) {
  std::istringstream is(s);
  is >> rng;
  if (is.fail()) throw CorruptFileError("random generator state is unreadable");
}

OptimizerState snapshot(const AdamW& opt) {
  return OptimizerState{opt.steps(), opt.first_moments(), opt.second_moments()};
}

void restore(AdamW& opt, const OptimizerState& s, const char* which) {
  if (s.m.size() != opt.first_moments().size() || s.v.size() != s.m.size())
    throw VersionError(std::string("checkpoint optimizer state for ") + which + " does not match the model");
  for (std::size_t i = 0; i < s.m.size(); ++i)
    if (s.m[i].size() != opt.first_moments()[i].size() || s.v[i].size() != s.m[i].size())
      throw VersionError(std::string("checkpoint optimizer state for ") + which + " does not match the model");
  opt.first_moments() = s.m;
  opt.second_moments() = s.v;
  opt.set_steps(s.steps);
}

}  // namespace

void Trainer::save_checkpoint(const fs::path& path) const {
  Checkpoint c;
  c.iteration = iteration_;
  c.config_text = serialize_config(config_);
  c.sampler_state = sampler_.state();
  c.segment_rng_state = rng_state(segment_rng_);
  c.dropout_rng_state = rng_state(dropout_rng_);
  c.params = model_.all().items();
  c.optimizers = {snapshot(gen_opt_), snapshot(accent_opt_), snapshot(hifi_opt_)};
  write_checkpoint(path, c);
}

void Trainer::load_checkpoint(const fs::path& path) {
  Checkpoint c = read_checkpoint(path);
  assign_parameters(c, model_);
  if (c.optimizers.size() != 3) throw VersionError("checkpoint holds " + std::to_string(c.optimizers.size()) + " optimizer states, expected 3");
  restore(gen_opt_, c.optimizers[0], "generator path");
  restore(accent_opt_, c.optimizers[1], "accent discriminator");
  restore(hifi_opt_, c.optimizers[2], "MSD/MPD");
  sampler_.set_state(c.sampler_state);
  set_rng_state(segment_rng_, c.segment_rng_state);
  set_rng_state(dropout_rng_, c.dropout_rng_state);
  iteration_ = c.iteration;
}

// ------------------------------------------------------------ checkpoint io

namespace {

constexpr char kMagic[8] = {'P', 'A', 'C', 'K', 'P', 'T', '\0', '\1'};
constexpr char kTrailer[4] = {'E', 'N', 'D', '.'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  template <typename T>
  void pod(T v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    bytes(s.data(), s.size());
  }
  void doubles(const std::vector<Scalar>& v) {
    pod<std::uint64_t>(v.size());
    bytes(v.data(), v.size() * sizeof(Scalar));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string name, std::uint64_t size) : is_(is), name_(std::move(name)), left_(size) {}
  void bytes(void* p, std::uint64_t n) {
    if (n > left_) throw CorruptFileError(name_ + ": truncated checkpoint");
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is_) throw CorruptFileError(name_ + ": truncated checkpoint");
    left_ -= n;
  }
  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof v);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > left_) throw CorruptFileError(name_ + ": truncated checkpoint");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::vector<Scalar> doubles() {
    const auto n = pod<std::uint64_t>();
    if (n > left_ / sizeof(Scalar)) throw CorruptFileError(name_ + ": truncated checkpoint");
    std::vector<Scalar> v(n);
    bytes(v.data(), n * sizeof(Scalar));
    return v;
  }
  std::uint64_t left() const { return left_; }

 private:
  std::istream& is_;
  std::string name_;
  std::uint64_t left_;
};

}  // namespace

bool Checkpoint::operator==(const Checkpoint& o) const {
  if (version != o.version || iteration != o.iteration || config_text != o.config_text ||
      sampler_state != o.sampler_state || segment_rng_state != o.segment_rng_state ||
      dropout_rng_state != o.dropout_rng_state || params.size() != o.params.size() ||
      optimizers.size() != o.optimizers.size())
    return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& a = params[i].second;
    const auto& b = o.params[i].second;
    if (params[i].first != o.params[i].first || a.shape() != b.shape()) return false;
    if (std::memcmp(a.values().data(), b.values().data(), a.numel() * sizeof(Scalar)) != 0) return false;
  }
  for (std::size_t i = 0; i < optimizers.size(); ++i)
    if (optimizers[i].steps != o.optimizers[i].steps || optimizers[i].m != o.optimizers[i].m ||
        optimizers[i].v != o.optimizers[i].v)
      return false;
  return true;
}

void write_checkpoint(const fs::path& path, const Checkpoint& c) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot write checkpoint " + tmp.string());
    Writer w(os);
    w.bytes(kMagic, sizeof kMagic);
    w.pod<std::uint32_t>(c.version);
    w.pod<std::int64_t>(c.iteration);
    w.str(c.config_text);
    w.str(c.sampler_state);
    w.str(c.segment_rng_state);
    w.str(c.dropout_rng_state);
    w.pod<std::uint64_t>(c.params.size());
    for (const auto& [name, t] : c.params) {
      w.str(name);
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
      for (int d : t.shape()) w.pod<std::int32_t>(d);
      w.doubles(std::vector<Scalar>(t.values().begin(), t.values().end()));
    }
    w.pod<std::uint64_t>(c.optimizers.size());
    for (const auto& o : c.optimizers) {
      w.pod<std::int64_t>(o.steps);
      w.pod<std::uint64_t>(o.m.size());
      for (std::size_t i = 0; i < o.m.size(); ++i) {
        w.doubles(o.m[i]);
        w.doubles(o.v[i]);
      }
    }
    w.bytes(kTrailer, sizeof kTrailer);
    if (!os.flush()) throw FormatError("failed writing checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint " + path.string());
  Reader r(is, path.string(), fs::file_size(path));
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError(path.string() + ": not a checkpoint file");
  Checkpoint c;
  c.version = r.pod<std::uint32_t>();
  if (c.version != kCheckpointVersion)
    throw VersionError(path.string() + ": checkpoint format version " + std::to_string(c.version) +
                       ", this build reads version " + std::to_string(kCheckpointVersion));
  c.iteration = r.pod<std::int64_t>();
  c.config_text = r.str();
  c.sampler_state = r.str();
  c.segment_rng_state = r.str();
  c.dropout_rng_state = r.str();
  const auto n_params = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    const auto rank = r.pod<std::uint32_t>();
    if (rank > 8) throw CorruptFileError(path.string() + ": implausible tensor rank");
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.pod<std::int32_t>());
    std::vector<Scalar> v = r.doubles();
    if (v.size() != shape_numel(shape)) throw CorruptFileError(path.string() + ": tensor " + name + " size mismatch");
    c.params.emplace_back(std::move(name), Tensor::from(std::move(v), shape, true));
  }
  const auto n_opt = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_opt; ++i) {
    OptimizerState o;
    o.steps = r.pod<std::int64_t>();
    const auto n = r.pod<std::uint64_t>();
    for (std::uint64_t j = 0; j < n; ++j) {
      o.m.push_back(r.doubles());
      o.v.push_back(r.doubles());
    }
    c.optimizers.push_back(std::move(o));
  }
  char trailer[sizeof kTrailer];
  r.bytes(trailer, sizeof trailer);
  if (std::memcmp(trailer, kTrailer, sizeof trailer) != 0 || r.left() != 0)
    throw CorruptFileError(path.string() + ": checkpoint trailer missing or extra bytes");
  return c;
}

void assign_parameters(const Checkpoint& ckpt, Model& model) {
  nn::ParameterSet ps = model.all();
  if (ps.size() != ckpt.params.size())
    throw VersionError("checkpoint has " + std::to_string(ckpt.params.size()) + " tensors, model expects " +
                       std::to_string(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto& [name, dst] = ps.items()[i];
    const auto& [cname, src] = ckpt.params[i];
    if (name != cname || dst.shape() != src.shape())
      throw VersionError("checkpoint tensor " + cname + " " + shape_str(src.shape()) +
                         " does not match model tensor " + name + " " + shape_str(dst.shape()));
    std::copy(src.values().begin(), src.values().end(), dst.mutable_values().begin());
  }
}

LoadedModel load_model(const fs::path& checkpoint) {
  Checkpoint c = read_checkpoint(checkpoint);
  Config config = parse_config(c.config_text);
  Model model(config, 0);
  assign_parameters(c, model);
  return LoadedModel{std::move(config), std::move(model), c.iteration};
}

Checkpoint initial_checkpoint(const Config& config) {
  Model model(config, config.training.seed);
  Checkpoint c;
  c.config_text = serialize_config(config);
  c.params = model.all().items();
  std::mt19937_64 rng(config.training.seed);
  c.sampler_state = rng_state(rng);
  c.segment_rng_state = rng_state(rng);
  c.dropout_rng_state = rng_state(rng);
  for (const auto& ps : {model.generator_path(), model.accent_discriminator(), model.hifi_discriminators()}) {
    OptimizerState o;
    for (const auto& [name, t] : ps.items()) {
      o.m.emplace_back(t.numel(), 0.0);
      o.v.emplace_back(t.numel(), 0.0);
    }
    c.optimizers.push_back(std::move(o));
  }
  return c;
}

}  // namespace polyaccent
