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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "agt/certifier.hpp"
#include "agt/datasets.hpp"
#include "agt/oracle.hpp"
#include "agt/trainer.hpp"

namespace agt::cli {

enum class Mechanism { kCauchy, kLaplace };

struct PrivacySection {
  std::vector<double> epsilons = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  double delta = 1e-5;
  std::size_t n_draws = 1000;
  std::uint64_t seed = 0;
  /// Mechanism whose beta is stored in the bundle and used by certify.
  Mechanism mechanism = Mechanism::kCauchy;
  double certify_epsilon = 1.0;
};

/// Everything an experiment needs. Parsed from JSON; every key is optional
/// and falls back to the defaults below, but unknown keys are rejected.
///
///   {
///     "dataset":  {"source": "blobs"|"csv", "n_samples", "n_features",
///                  "class_separation", "noise_sd", "seed", "split_fraction",
///                  "csv_path", "label_column", "min_max_scale"},
///     "model":    {"hidden": [64]},
///     "training": {"epochs", "lr", "lr_decay", "batch_size", "clip",
///                  "shuffle_seed", "init_seed"},
///     "mode":     "privacy"|"unlearning",
///     "kset":     [1, 2, 3, ...],
///     "privacy":  {"epsilons", "delta", "n_draws", "seed", "mechanism",
///                  "certify_epsilon"},
///     "oracle":   {"random_trials", "adversarial_trials", "seed", "tolerance"}
///   }
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<std::size_t> hidden = {64};
  TrainConfig training;
  PerturbationMode mode = PerturbationMode::kPrivacy;
  std::vector<std::size_t> kset = kDefaultKSet;
  PrivacySection privacy;
  TrialPlan oracle;

  /// Layer widths for a dataset with the given feature and class counts.
  std::vector<std::size_t> widths(std::size_t n_features, std::size_t n_classes) const;
  /// Beta stored in bundles: the smooth-sensitivity parameter of the
  /// configured mechanism at certify_epsilon.
  double certify_beta() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Derives every seed in the config from one value.
void apply_seed_override(ExperimentConfig& config, std::uint64_t seed);

/// Canonical JSON with every default filled in; identical experiments give
/// identical text regardless of key order or omitted defaults.
std::string canonical_json(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace agt::cli
