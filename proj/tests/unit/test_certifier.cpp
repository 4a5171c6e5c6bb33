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

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "agt/bound_prop.hpp"
#include "agt/certifier.hpp"
#include "agt/datasets.hpp"
#include "agt/errors.hpp"
#include "agt/mechanisms.hpp"
#include "agt/trainer.hpp"
#include "generators.hpp"

namespace agt {
namespace {

using testing::Gen;

ParamBox uniform_box(const Mlp& model, double radius) {
  std::vector<IntervalLayer> bounds;
  for (const DenseLayer& layer : model.layers()) {
    Tensor wl = layer.weight, wh = layer.weight, bl = layer.bias, bh = layer.bias;
    for (double& v : wl.values()) v -= radius;
    for (double& v : wh.values()) v += radius;
    for (double& v : bl.values()) v -= radius;
    for (double& v : bh.values()) v += radius;
    bounds.push_back({IntervalTensor(wl, wh), IntervalTensor(bl, bh)});
  }
  return ParamBox(model, std::move(bounds));
}

CertificateBundle synthetic_bundle(const Mlp& model, const std::vector<std::size_t>& kset,
                                   double radius_per_k) {
  CertificateBundle bundle;
  bundle.kset = kset;
  for (std::size_t k : kset) bundle.boxes.push_back(uniform_box(model, radius_per_k * static_cast<double>(k)));
  return bundle;
}

std::optional<std::size_t> linear_k_prime(const CertificateBundle& bundle, std::span<const double> x) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < bundle.kset.size(); ++i) {
    if (!is_safe(bundle.boxes[i], x).certified) break;
    best = bundle.kset[i];
  }
  return best;
}

TEST(IsSafe, PointBoxCertifiesUnlessLogitsTie) {
  Gen gen(51);
  for (int t = 0; t < 200; ++t) {
    const Mlp model = gen.mlp({3, 5, 3});
    const auto x = gen.vector(3);
    const Tensor logits = predict_logits(model, x);
    const SafetyResult r = is_safe(ParamBox::point(model), x);
    EXPECT_EQ(r.predicted, argmax(logits));
    EXPECT_TRUE(r.certified);
  }
}

TEST(IsSafe, TiedLogitsAreNotCertified) {
  Mlp model({DenseLayer{Tensor(2, 1, 0.0), Tensor(2, 1, 0.5)}});
  const std::vector<double> x{1.0};
  EXPECT_FALSE(is_safe(ParamBox::point(model), x).certified);
}

TEST(IsSafe, WideBoxIsNotCertified) {
  Gen gen(52);
  const Mlp model = gen.mlp({2, 4, 2});
  const auto x = gen.vector(2);
  EXPECT_FALSE(is_safe(uniform_box(model, 100.0), x).certified);
}

TEST(FindKPrime, MatchesLinearScan) {
  Gen gen(53);
  const std::vector<std::size_t> kset{1, 2, 3, 5, 8, 13, 21, 34};
  for (int t = 0; t < 300; ++t) {
    const Mlp model = gen.mlp({2, 6, 2});
    const CertificateBundle bundle = synthetic_bundle(model, kset, gen.uniform(1e-4, 0.05));
    const auto x = gen.vector(2, -3.0, 3.0);
    ASSERT_EQ(find_k_prime(bundle, x), linear_k_prime(bundle, x));
  }
}

TEST(FindKPrime, EmptyWhenSmallestBoxFails) {
  Gen gen(54);
  const Mlp model = gen.mlp({2, 3, 2});
  const CertificateBundle bundle = synthetic_bundle(model, {1, 2}, 50.0);
  EXPECT_EQ(find_k_prime(bundle, gen.vector(2)), std::nullopt);
  EXPECT_EQ(k_star_from_bundle(bundle, gen.vector(2)), 1u);
}

TEST(SmoothBound, WorkedExample) {
  const double beta = 1.0 / (2.0 * std::log(2.0 / 1e-5));
  EXPECT_NEAR(smooth_bound_from_k_prime(5, beta), 0.6117, 1e-4);
  EXPECT_EQ(smooth_bound_from_k_prime(std::nullopt, beta), 1.0);
}

TEST(SmoothBound, DecreasesInKPrimeAndStaysInUnitInterval) {
  for (double beta : {1e-3, 0.04, 0.5}) {
    double prev = 1.0;
    for (std::size_t k = 1; k < 200; ++k) {
      const double s = smooth_bound_from_k_prime(k, beta);
      ASSERT_GT(s, 0.0);
      ASSERT_LT(s, prev);
      prev = s;
    }
  }
}

TEST(SmoothBound, RejectsNonPositiveBeta) {
  Gen gen(55);
  const Mlp model = gen.mlp({2, 2});
  const CertificateBundle bundle = synthetic_bundle(model, {1}, 0.0);
  EXPECT_THROW(smooth_sensitivity_bound(bundle, gen.vector(2), 0.0), ConfigError);
}

TEST(CertifyQuery, LadderIsMonotoneAndConsistent) {
  Gen gen(56);
  const std::vector<std::size_t> kset{1, 2, 4, 8, 16};
  for (int t = 0; t < 100; ++t) {
    const Mlp model = gen.mlp({2, 4, 2});
    const CertificateBundle bundle = synthetic_bundle(model, kset, gen.uniform(1e-3, 0.05));
    const auto x = gen.vector(2);
    const QueryCertificate q = certify_query(bundle, x, 0.1);
    ASSERT_EQ(q.ls_at_k.size(), kset.size());
    for (std::size_t i = 0; i + 1 < kset.size(); ++i) ASSERT_LE(q.ls_at_k[i], q.ls_at_k[i + 1]);
    ASSERT_EQ(q.k_prime, find_k_prime(bundle, x));
    ASSERT_EQ(q.smooth_bound, smooth_bound_from_k_prime(q.k_prime, 0.1));
    ASSERT_EQ(q.predicted, argmax(predict_logits(model, x)));
  }
}

TEST(CertifiedFraction, NonIncreasingInK) {
  DatasetSpec spec;
  spec.seed = 5;
  const DatasetSplit data = make_blobs(spec);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 60;
  const std::vector<std::size_t> widths{2, 16, 2};
  CertificateBundle bundle;
  bundle.kset = {1, 2, 5, 10};
  for (std::size_t k : bundle.kset) {
    bundle.boxes.push_back(train(data.train.examples, widths, cfg, PerturbationModel::privacy(k)));
  }
  EXPECT_NO_THROW(bundle.validate());
  const auto fractions = certified_fraction(bundle, data.test.examples);
  ASSERT_EQ(fractions.size(), 4u);
  for (std::size_t i = 0; i + 1 < fractions.size(); ++i) EXPECT_GE(fractions[i], fractions[i + 1]);
  EXPECT_GT(fractions.front(), 0.5);
}

TEST(CertifiedFraction, FarPointsCertifyAtLeastAsDeepAsBoundaryPoints) {
  DatasetSpec spec;
  spec.seed = 6;
  const DatasetSplit data = make_blobs(spec);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 60;
  const std::vector<std::size_t> widths{2, 16, 2};
  CertificateBundle bundle;
  bundle.kset = {1, 2, 4, 8, 16};
  for (std::size_t k : bundle.kset) {
    bundle.boxes.push_back(train(data.train.examples, widths, cfg, PerturbationModel::privacy(k)));
  }
  // Pick the test points with the largest and smallest logit margins.
  double best = -1.0, worst = 1e300;
  std::vector<double> far, near;
  for (const auto& ex : data.test.examples) {
    const Tensor z = predict_logits(bundle.nominal(), ex.x);
    const double margin = std::abs(z[0] - z[1]);
    if (margin > best) best = margin, far = ex.x;
    if (margin < worst) worst = margin, near = ex.x;
  }
  const std::size_t far_k = k_star_from_bundle(bundle, far);
  const std::size_t near_k = k_star_from_bundle(bundle, near);
  EXPECT_GE(far_k, near_k);
  EXPECT_GT(far_k, 1u);
}

TEST(CertificateBundle, ValidationRejectsMalformedLadders) {
  Gen gen(57);
  const Mlp model = gen.mlp({2, 2});
  CertificateBundle bundle = synthetic_bundle(model, {1, 2}, 0.01);
  EXPECT_NO_THROW(bundle.validate());
  bundle.kset = {2, 1};
  EXPECT_THROW(bundle.validate(), ConfigError);
  bundle.kset = {0, 1};
  EXPECT_THROW(bundle.validate(), ConfigError);
  bundle.kset = {1};
  EXPECT_THROW(bundle.validate(), ConfigError);
}

}  // namespace
}  // namespace agt
