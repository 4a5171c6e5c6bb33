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
#include <optional>
#include <span>
#include <vector>

#include "agt/param_box.hpp"
#include "agt/trainer.hpp"

namespace agt {

/// The default ladder of k values, denser at small k.
inline const std::vector<std::size_t> kDefaultKSet = {1, 2, 3, 4, 5, 8, 12, 16, 24, 32};

/// Parameter boxes for an increasing ladder of k, all trained with the same
/// data, seeds and schedule.
struct CertificateBundle {
  std::vector<std::size_t> kset;
  std::vector<ParamBox> boxes;
  PerturbationMode mode = PerturbationMode::kPrivacy;
  double beta = 0.0;
  std::uint64_t config_hash = 0;

  /// Throws ConfigError unless kset is non-empty, strictly increasing, >= 1,
  /// and matches boxes one to one.
  void validate() const;
  const Mlp& nominal() const { return boxes.front().nominal(); }
};

struct SafetyResult {
  bool certified = false;
  int predicted = 0;
};

/// Certified iff the nominal argmax class c satisfies lo[c] > hi[c'] for
/// every other class c' over the interval logits of the box. Ties are not
/// certified.
SafetyResult is_safe(const ParamBox& box, std::span<const double> x);

/// Largest k in the ladder whose box certifies x, found by binary search;
/// std::nullopt when the smallest k already fails.
std::optional<std::size_t> find_k_prime(const CertificateBundle& bundle, std::span<const double> x);

/// exp(-2 beta (k' + 1)) when k' exists, otherwise 1 (global sensitivity).
double smooth_bound_from_k_prime(std::optional<std::size_t> k_prime, double beta);

/// Upper bound on the beta-smooth sensitivity of the prediction at x.
/// Throws ConfigError unless beta > 0.
double smooth_sensitivity_bound(const CertificateBundle& bundle, std::span<const double> x, double beta);

struct QueryCertificate {
  int predicted = 0;
  std::optional<std::size_t> k_prime;
  std::vector<int> ls_at_k;  // local sensitivity bound (0 or 1) per ladder entry
  double smooth_bound = 1.0;
};

/// Full certificate for one query: every ladder entry plus the binary-search k'.
QueryCertificate certify_query(const CertificateBundle& bundle, std::span<const double> x, double beta);

/// Fraction of examples certified by each box of the ladder.
std::vector<double> certified_fraction(const CertificateBundle& bundle,
                                       std::span<const LabeledExample> examples);

}  // namespace agt
