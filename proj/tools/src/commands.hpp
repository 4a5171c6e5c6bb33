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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "agt/certifier.hpp"
#include "agt/datasets.hpp"
#include "config.hpp"

namespace agt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfigError = 2;

/// Loads the configured dataset and applies min-max scaling if requested.
DatasetSplit load_experiment_data(const ExperimentConfig& config);

/// Trains one box per k in config.kset, in config.mode.
CertificateBundle train_bundle(const ExperimentConfig& config, const DatasetSplit& data);

/// Per-query rows: index,label,predicted,k_prime,smooth_bound. k_prime is
/// empty when no ladder entry certifies the query.
void write_certificates_csv(std::ostream& out, const CertificateBundle& bundle,
                            std::span<const LabeledExample> queries);
/// Rows: k,certified_fraction.
void write_certified_fraction_csv(std::ostream& out, const CertificateBundle& bundle,
                                  std::span<const LabeledExample> queries);

/// Rows: epsilon,mechanism,accuracy,noiseless_accuracy,mean_smooth_sensitivity,
/// mean_eps_s. Mechanisms are global_laplace (with the tightened epsilon
/// averaged over queries), smooth_cauchy and smooth_laplace.
void write_privacy_eval_csv(std::ostream& out, const CertificateBundle& bundle,
                            std::span<const LabeledExample> queries, const PrivacySection& privacy);

/// Rows per query and epsilon: query_index,epsilon,delta,k_prime,k_star,
/// smooth_bound,eps_s. smooth_bound uses the beta of privacy.mechanism.
void write_accounting_csv(std::ostream& out, const CertificateBundle& bundle,
                          std::span<const LabeledExample> queries, const PrivacySection& privacy);

/// Entry point of the agt executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agt::cli
