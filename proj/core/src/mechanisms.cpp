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
#include "agt/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "agt/errors.hpp"

namespace agt {
namespace {

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

void require_sensitivity(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("smooth sensitivity must be finite and >= 0");
}

}  // namespace

PrivacySpec PrivacySpec::for_laplace(double epsilon, double delta) {
  PrivacySpec spec{epsilon, delta, 0.0, 2};
  spec.beta = epsilon / (2.0 * std::log(2.0 / delta));
  return spec;
}

PrivacySpec PrivacySpec::for_cauchy(double epsilon, int g) {
  PrivacySpec spec{epsilon, 0.0, 0.0, g};
  spec.beta = epsilon / (2.0 * (g + 1)) * (1.0 - 1e-6);
  return spec;
}

void PrivacySpec::validate_laplace() const {
  require_positive_epsilon(epsilon);
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("smooth Laplace mechanism needs delta in (0, 1)");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (beta > epsilon / (2.0 * std::log(2.0 / delta))) {
    throw ConfigError("smooth Laplace mechanism needs beta <= epsilon / (2 ln(2/delta))");
  }
}

void PrivacySpec::validate_cauchy() const {
  require_positive_epsilon(epsilon);
  if (g != 2) throw ConfigError("only g = 2 (Cauchy noise) is supported");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(beta < epsilon / (2.0 * (g + 1)))) {
    throw ConfigError("smooth Cauchy mechanism needs beta < epsilon / (2 (g + 1))");
  }
}

int release_binary(double score, double epsilon, Rng& rng) {
  require_positive_epsilon(epsilon);
  if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("score must lie in [0, 1]");
  return threshold_label(score + rng.laplace(1.0 / epsilon));
}

double release_smooth_cauchy(double score, double smooth_sensitivity, const PrivacySpec& spec, Rng& rng) {
  spec.validate_cauchy();
  require_sensitivity(smooth_sensitivity);
  const double scale = 2.0 * (spec.g + 1) * smooth_sensitivity / spec.epsilon;
  // Draw even when the scale is zero so streams stay aligned across queries.
  const double eta = rng.cauchy();
  return scale == 0.0 ? score : score + scale * eta;
}

double release_smooth_laplace(double score, double smooth_sensitivity, const PrivacySpec& spec, Rng& rng) {
  spec.validate_laplace();
  require_sensitivity(smooth_sensitivity);
  const double scale = 2.0 * smooth_sensitivity / spec.epsilon;
  const double eta = rng.laplace(1.0);
  return scale == 0.0 ? score : score + scale * eta;
}

int threshold_label(double noisy_score) { return noisy_score > 0.5 ? 1 : 0; }

double lambert_w0(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("lambert_w0: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w = std::log1p(x);
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double fp = ew * (w + 1.0);
    const double step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  // One Newton polish for the last ulp.
  const double ew = std::exp(w);
  const double f = w * ew - x;
  const double fp = ew * (w + 1.0);
  if (fp != 0.0) w -= f / fp;
  return w;
}

AccountingResult tighter_epsilon(double epsilon, double delta, std::size_t k_star) {
  require_positive_epsilon(epsilon);
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("tighter_epsilon: delta must lie in (0, 1)");
  if (k_star < 1) throw DomainError("tighter_epsilon: k_star must be at least 1");
  const double log_term = std::log(2.0 / delta);
  const double k = static_cast<double>(k_star);
  const double eps_s = log_term / k * lambert_w0(2.0 * epsilon * k / log_term);
  return {eps_s, k_star, delta};
}

std::size_t k_star_from_bundle(const CertificateBundle& bundle, std::span<const double> x) {
  const auto k_prime = find_k_prime(bundle, x);
  return k_prime ? *k_prime + 1 : 1;
}

}  // namespace agt
