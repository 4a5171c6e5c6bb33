// Copyright 2026 The AGT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <set>
#include <utility>

#include "agt/errors.hpp"
#include "agt/mechanisms.hpp"
#include "agt/random.hpp"
#include "agt/serialize.hpp"
#include "json.hpp"

namespace agt::cli {
namespace {

using nlohmann::json;

// Reads keys of one JSON object and rejects any it was not asked about.
class Section {
 public:
  Section(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* to_string(DataSource source) { return source == DataSource::kBlobs ? "blobs" : "csv"; }
const char* to_string(Mechanism m) { return m == Mechanism::kCauchy ? "cauchy" : "laplace"; }

json to_json(const ExperimentConfig& c) {
  return json{
      {"dataset",
       {{"source", to_string(c.dataset.source)},
        {"n_samples", c.dataset.n_samples},
        {"n_features", c.dataset.n_features},
        {"class_separation", c.dataset.class_separation},
        {"noise_sd", c.dataset.noise_sd},
        {"seed", c.dataset.seed},
        {"split_fraction", c.dataset.split_fraction},
        {"csv_path", c.dataset.csv_path.generic_string()},
        {"label_column", c.dataset.label_column},
        {"min_max_scale", c.dataset.min_max_scale}}},
      {"model", {{"hidden", c.hidden}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"lr", c.training.lr},
        {"lr_decay", c.training.lr_decay},
        {"batch_size", c.training.batch_size},
        {"clip", c.training.clip},
        {"shuffle_seed", c.training.shuffle_seed},
        {"init_seed", c.training.init_seed}}},
      {"mode", agt::to_string(c.mode)},
      {"kset", c.kset},
      {"privacy",
       {{"epsilons", c.privacy.epsilons},
        {"delta", c.privacy.delta},
        {"n_draws", c.privacy.n_draws},
        {"seed", c.privacy.seed},
        {"mechanism", to_string(c.privacy.mechanism)},
        {"certify_epsilon", c.privacy.certify_epsilon}}},
      {"oracle",
       {{"random_trials", c.oracle.random_trials},
        {"adversarial_trials", c.oracle.adversarial_trials},
        {"seed", c.oracle.seed},
        {"tolerance", c.oracle.tolerance}}}};
}

void validate(const ExperimentConfig& c) {
  c.dataset.validate();
  for (std::size_t w : c.hidden) {
    if (w == 0) throw ConfigError("model.hidden: widths must be positive");
  }
  if (c.training.epochs == 0) throw ConfigError("training.epochs must be positive");
  if (!(c.training.lr > 0.0)) throw ConfigError("training.lr must be positive");
  if (!(c.training.lr_decay >= 0.0)) throw ConfigError("training.lr_decay must be non-negative");
  if (c.training.batch_size == 0) throw ConfigError("training.batch_size must be positive");
  if (!(c.training.clip > 0.0)) throw ConfigError("training.clip must be positive");
  if (c.kset.empty()) throw ConfigError("kset must not be empty");
  for (std::size_t i = 0; i < c.kset.size(); ++i) {
    if (c.kset[i] == 0) throw ConfigError("kset entries must be at least 1");
    if (i > 0 && c.kset[i] <= c.kset[i - 1]) throw ConfigError("kset must be strictly increasing");
  }
  if (c.kset.back() >= c.training.batch_size) {
    throw ConfigError("kset: largest k must be below training.batch_size");
  }
  for (double eps : c.privacy.epsilons) {
    if (!(eps > 0.0)) throw ConfigError("privacy.epsilons must be positive");
  }
  if (!(c.privacy.delta > 0.0 && c.privacy.delta < 1.0)) {
    throw ConfigError("privacy.delta must lie in (0, 1)");
  }
  if (c.privacy.n_draws == 0) throw ConfigError("privacy.n_draws must be positive");
  if (!(c.privacy.certify_epsilon > 0.0)) throw ConfigError("privacy.certify_epsilon must be positive");
  if (!(c.oracle.tolerance >= 0.0)) throw ConfigError("oracle.tolerance must be non-negative");
}

}  // namespace

std::vector<std::size_t> ExperimentConfig::widths(std::size_t n_features, std::size_t n_classes) const {
  std::vector<std::size_t> out{n_features};
  out.insert(out.end(), hidden.begin(), hidden.end());
  out.push_back(n_classes);
  return out;
}

double ExperimentConfig::certify_beta() const {
  return privacy.mechanism == Mechanism::kCauchy
             ? PrivacySpec::for_cauchy(privacy.certify_epsilon).beta
             : PrivacySpec::for_laplace(privacy.certify_epsilon, privacy.delta).beta;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section top(root, "config");

  if (const json* node = top.child("dataset")) {
    Section s(*node, "dataset");
    std::string source = "blobs";
    std::string csv_path;
    s.read("source", source);
    if (source == "blobs") {
      c.dataset.source = DataSource::kBlobs;
    } else if (source == "csv") {
      c.dataset.source = DataSource::kCsv;
    } else {
      throw ConfigError("dataset.source must be 'blobs' or 'csv'");
    }
    s.read("n_samples", c.dataset.n_samples);
    s.read("n_features", c.dataset.n_features);
    s.read("class_separation", c.dataset.class_separation);
    s.read("noise_sd", c.dataset.noise_sd);
    s.read("seed", c.dataset.seed);
    s.read("split_fraction", c.dataset.split_fraction);
    s.read("csv_path", csv_path);
    s.read("label_column", c.dataset.label_column);
    s.read("min_max_scale", c.dataset.min_max_scale);
    s.finish();
    c.dataset.csv_path = csv_path;
  }
  if (const json* node = top.child("model")) {
    Section s(*node, "model");
    s.read("hidden", c.hidden);
    s.finish();
  }
  if (const json* node = top.child("training")) {
    Section s(*node, "training");
    s.read("epochs", c.training.epochs);
    s.read("lr", c.training.lr);
    s.read("lr_decay", c.training.lr_decay);
    s.read("batch_size", c.training.batch_size);
    s.read("clip", c.training.clip);
    s.read("shuffle_seed", c.training.shuffle_seed);
    s.read("init_seed", c.training.init_seed);
    s.finish();
  }
  std::string mode = agt::to_string(c.mode);
  top.read("mode", mode);
  c.mode = parse_perturbation_mode(mode);
  top.read("kset", c.kset);
  if (const json* node = top.child("privacy")) {
    Section s(*node, "privacy");
    std::string mechanism = "cauchy";
    s.read("epsilons", c.privacy.epsilons);
    s.read("delta", c.privacy.delta);
    s.read("n_draws", c.privacy.n_draws);
    s.read("seed", c.privacy.seed);
    s.read("mechanism", mechanism);
    s.read("certify_epsilon", c.privacy.certify_epsilon);
    s.finish();
    if (mechanism == "cauchy") {
      c.privacy.mechanism = Mechanism::kCauchy;
    } else if (mechanism == "laplace") {
      c.privacy.mechanism = Mechanism::kLaplace;
    } else {
      throw ConfigError("privacy.mechanism must be 'cauchy' or 'laplace'");
    }
  }
  if (const json* node = top.child("oracle")) {
    Section s(*node, "oracle");
    s.read("random_trials", c.oracle.random_trials);
    s.read("adversarial_trials", c.oracle.adversarial_trials);
    s.read("seed", c.oracle.seed);
    s.read("tolerance", c.oracle.tolerance);
    s.finish();
  }
  top.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

void apply_seed_override(ExperimentConfig& config, std::uint64_t seed) {
  config.dataset.seed = mix_seed(seed, 0);
  config.training.shuffle_seed = mix_seed(seed, 1);
  config.training.init_seed = mix_seed(seed, 2);
  config.privacy.seed = mix_seed(seed, 3);
  config.oracle.seed = mix_seed(seed, 4);
}

std::string canonical_json(const ExperimentConfig& config) { return to_json(config).dump(); }

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(canonical_json(config));
}

}  // namespace agt::cli
