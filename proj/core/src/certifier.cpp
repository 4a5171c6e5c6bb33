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
#include "agt/certifier.hpp"

#include <cmath>
#include <string>

#include "agt/bound_prop.hpp"
#include "agt/errors.hpp"

namespace agt {

void CertificateBundle::validate() const {
  if (kset.empty()) throw ConfigError("bundle: empty k-set");
  if (kset.size() != boxes.size()) {
    throw ConfigError("bundle: " + std::to_string(kset.size()) + " k values but " +
                      std::to_string(boxes.size()) + " boxes");
  }
  if (kset.front() < 1) throw ConfigError("bundle: k values must be at least 1");
  for (std::size_t i = 1; i < kset.size(); ++i) {
    if (kset[i] <= kset[i - 1]) throw ConfigError("bundle: k-set must be strictly increasing");
  }
  for (const ParamBox& box : boxes) {
    if (!(box.nominal() == boxes.front().nominal())) {
      throw ConfigError("bundle: boxes do not share a nominal model");
    }
  }
}

SafetyResult is_safe(const ParamBox& box, std::span<const double> x) {
  const int predicted = argmax(predict_logits(box.nominal(), x));
  const IntervalTensor logits = interval_forward(box, x).logits();
  const auto c = static_cast<std::size_t>(predicted);
  bool certified = true;
  for (std::size_t other = 0; other < logits.size() && certified; ++other) {
    if (other != c && !(logits.lo()[c] > logits.hi()[other])) certified = false;
  }
  return {certified, predicted};
}

std::optional<std::size_t> find_k_prime(const CertificateBundle& bundle, std::span<const double> x) {
  if (bundle.boxes.empty()) throw ConfigError("find_k_prime: empty bundle");
  // Invariant: entries below lo certify, entries at or above hi do not.
  std::size_t lo = 0;
  std::size_t hi = bundle.boxes.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (is_safe(bundle.boxes[mid], x).certified) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == 0) return std::nullopt;
  return bundle.kset[lo - 1];
}

double smooth_bound_from_k_prime(std::optional<std::size_t> k_prime, double beta) {
  if (!(beta > 0.0)) throw ConfigError("smooth sensitivity: beta must be positive");
  if (!k_prime) return 1.0;
  return std::exp(-2.0 * beta * (static_cast<double>(*k_prime) + 1.0));
}

double smooth_sensitivity_bound(const CertificateBundle& bundle, std::span<const double> x, double beta) {
  if (!(beta > 0.0)) throw ConfigError("smooth sensitivity: beta must be positive");
  return smooth_bound_from_k_prime(find_k_prime(bundle, x), beta);
}

QueryCertificate certify_query(const CertificateBundle& bundle, std::span<const double> x, double beta) {
  QueryCertificate out;
  out.ls_at_k.reserve(bundle.boxes.size());
  for (const ParamBox& box : bundle.boxes) {
    const SafetyResult r = is_safe(box, x);
    out.predicted = r.predicted;
    out.ls_at_k.push_back(r.certified ? 0 : 1);
  }
  out.k_prime = find_k_prime(bundle, x);
  out.smooth_bound = smooth_bound_from_k_prime(out.k_prime, beta);
  return out;
}

std::vector<double> certified_fraction(const CertificateBundle& bundle,
                                       std::span<const LabeledExample> examples) {
  std::vector<double> fractions(bundle.boxes.size(), 0.0);
  if (examples.empty()) return fractions;
  for (std::size_t i = 0; i < bundle.boxes.size(); ++i) {
    std::size_t certified = 0;
    for (const LabeledExample& e : examples) certified += is_safe(bundle.boxes[i], e.x).certified;
    fractions[i] = static_cast<double>(certified) / static_cast<double>(examples.size());
  }
  return fractions;
}

}  // namespace agt
