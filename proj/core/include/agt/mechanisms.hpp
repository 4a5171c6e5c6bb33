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
#include <span>

#include "agt/certifier.hpp"
#include "agt/random.hpp"

namespace agt {

/// Privacy parameters for a single released prediction. beta is the
/// smoothing parameter of smooth sensitivity; g is the shape of the
/// heavy-tailed noise density 1 / (1 + |z|^g).
struct PrivacySpec {
  double epsilon = 1.0;
  double delta = 1e-5;
  double beta = 0.0;
  int g = 2;

  /// beta = epsilon / (2 ln(2 / delta)).
  static PrivacySpec for_laplace(double epsilon, double delta);
  /// beta just below epsilon / (2 (g + 1)); the constraint is strict.
  static PrivacySpec for_cauchy(double epsilon, int g = 2);

  /// Throws ConfigError unless epsilon > 0, delta in (0, 1), beta > 0 and
  /// beta <= epsilon / (2 ln(2 / delta)).
  void validate_laplace() const;
  /// Throws ConfigError unless epsilon > 0, g == 2, beta > 0 and
  /// beta < epsilon / (2 (g + 1)).
  void validate_cauchy() const;
};

struct AccountingResult {
  double eps_s = 0.0;
  std::size_t k_star = 0;
  double delta = 0.0;
};

/// Label released by thresholding score + Lap(1 / epsilon) at 0.5.
/// score must lie in [0, 1]; epsilon must be positive.
int release_binary(double score, double epsilon, Rng& rng);

/// score + (2 (g + 1) S / epsilon) * eta with eta ~ Cauchy(1) (g = 2, so a
/// scale of 6 S / epsilon).
double release_smooth_cauchy(double score, double smooth_sensitivity, const PrivacySpec& spec, Rng& rng);

/// score + (2 S / epsilon) * eta with eta ~ Lap(1).
double release_smooth_laplace(double score, double smooth_sensitivity, const PrivacySpec& spec, Rng& rng);

/// 1 if a noisy score exceeds 0.5, else 0.
int threshold_label(double noisy_score);

/// Principal branch of the Lambert W function for x >= 0: the w >= 0 with
/// w e^w = x. Halley iteration from log(1 + x). Throws DomainError for x < 0
/// or NaN.
double lambert_w0(double x);

/// Privacy loss of releasing score + Lap(1/epsilon) once the smooth
/// sensitivity is known to peak at k_star:
///   eps_s = ln(2/delta) / k_star * W0(2 epsilon k_star / ln(2/delta)).
AccountingResult tighter_epsilon(double epsilon, double delta, std::size_t k_star);

/// k' + 1 from the ladder, or 1 when nothing certifies: a lower bound on the
/// first k at which the prediction can change.
std::size_t k_star_from_bundle(const CertificateBundle& bundle, std::span<const double> x);

}  // namespace agt
