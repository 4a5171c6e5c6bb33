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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "agt/certifier.hpp"
#include "agt/datasets.hpp"
#include "agt/errors.hpp"
#include "agt/oracle.hpp"
#include "agt/random.hpp"
#include "agt/trainer.hpp"
#include "generators.hpp"

namespace agt {
namespace {

using testing::Gen;

struct Fixture {
  DatasetSplit data;
  std::vector<std::size_t> widths{2, 16, 2};
  TrainConfig cfg;
  std::vector<LabeledExample> pool;
};

Fixture blobs_fixture(std::size_t n_samples = 300, std::size_t hidden = 16) {
  Fixture f;
  DatasetSpec spec;
  spec.n_samples = n_samples;
  spec.seed = 7;
  f.data = make_blobs(spec);
  f.widths = {2, hidden, 2};
  f.cfg.epochs = 3;
  f.cfg.batch_size = 60;
  f.cfg.shuffle_seed = 1;
  f.cfg.init_seed = 2;
  f.pool = make_candidate_pool(f.data.train.examples, f.data.test.examples);
  return f;
}

// Largest |theta' - theta| relative to the box half-width on that side.
double reach(const ParamBox& box, const Mlp& model) {
  const auto lo = box.flat_lo(), hi = box.flat_hi();
  const auto centre = flatten(box.nominal().layers());
  const auto theta = flatten(model.layers());
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double d = theta[i] - centre[i];
    const double room = d >= 0 ? hi[i] - centre[i] : centre[i] - lo[i];
    if (room > 0) worst = std::max(worst, std::abs(d) / room);
  }
  return worst;
}

std::vector<LabeledExample> micro_data() {
  return {{{-2.0, -1.0}, 0}, {{-1.5, 0.5}, 0}, {{-1.0, -0.5}, 0}, {{-0.3, 0.2}, 0},
          {{0.4, -0.1}, 1},  {{1.0, 0.5}, 1},  {{1.5, -0.5}, 1}, {{2.0, 1.0}, 1}};
}

TrainConfig micro_config() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.lr = 0.5;
  cfg.clip = 1.0;
  cfg.shuffle_seed = 3;
  cfg.init_seed = 4;
  return cfg;
}

TEST(PerturbDataset, RespectsBudgetAndIsDeterministic) {
  const Fixture f = blobs_fixture();
  const auto& train = f.data.train.examples;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PerturbOptions opt;
    opt.full_budget = seed % 2 == 0;
    const auto e = perturb_dataset(train, PerturbationModel::privacy(3), seed, f.pool, 60, opt);
    ASSERT_LE(e.removals(), 3u);
    ASSERT_LE(e.additions(), 3u);
    if (opt.full_budget) {
      ASSERT_EQ(e.removals(), 3u);
    }
    ASSERT_TRUE(std::is_sorted(e.removed.begin(), e.removed.end()));
    ASSERT_EQ(std::adjacent_find(e.removed.begin(), e.removed.end()), e.removed.end());
    for (std::size_t i : e.removed) ASSERT_LT(i, train.size());
    const auto again = perturb_dataset(train, PerturbationModel::privacy(3), seed, f.pool, 60, opt);
    ASSERT_EQ(e.removed, again.removed);
    ASSERT_EQ(e.added, again.added);
    ASSERT_EQ(e.placement_seed, again.placement_seed);
  }
  const auto u = perturb_dataset(train, PerturbationModel::unlearning(4), 9, f.pool, 60);
  EXPECT_EQ(u.additions(), 0u);
  EXPECT_EQ(u.removals(), 4u);
}

TEST(PerturbDataset, IdentityModelLeavesDataUntouched) {
  const Fixture f = blobs_fixture();
  const auto e = perturb_dataset(f.data.train.examples, PerturbationModel::none(), 1, f.pool, 60);
  EXPECT_EQ(e.removals(), 0u);
  EXPECT_EQ(e.additions(), 0u);
  const Mlp a = retrain_perturbed(f.data.train.examples, e, f.widths, f.cfg);
  EXPECT_EQ(a, train_nominal(f.data.train.examples, f.widths, f.cfg));
}

TEST(PerturbDataset, RejectsInfeasibleEdits) {
  const Fixture f = blobs_fixture();
  const auto& train = f.data.train.examples;
  // |data| - k_remove must stay above the batch size.
  EXPECT_THROW(perturb_dataset(train, PerturbationModel::unlearning(2), 1, f.pool, train.size() - 2),
               ConfigError);
  EXPECT_NO_THROW(perturb_dataset(train, PerturbationModel::unlearning(2), 1, f.pool, train.size() - 3));
  EXPECT_THROW(perturb_dataset(train, PerturbationModel::unlearning(5), 1, f.pool, 5), ConfigError);
  EXPECT_THROW(perturb_dataset(train, PerturbationModel::privacy(1), 1, {}, 60), ConfigError);
  PerturbOptions adv;
  adv.kind = TrialKind::kAdversarial;
  EXPECT_THROW(perturb_dataset(train, PerturbationModel::privacy(1), 1, f.pool, 60, adv), ConfigError);
}

TEST(CandidatePool, HeldOutPlusSyntheticExtremes) {
  const Fixture f = blobs_fixture();
  EXPECT_EQ(f.pool.size(), f.data.test.size() + 8);
  for (std::size_t i = 0; i < f.data.test.size(); ++i) EXPECT_EQ(f.pool[i], f.data.test.examples[i]);
}

TEST(GradientNorm, ZeroOnlyWhenLossIsFlat) {
  const Fixture f = blobs_fixture();
  const Mlp model = train_nominal(f.data.train.examples, f.widths, f.cfg);
  for (const auto& ex : f.data.test.examples) EXPECT_GE(gradient_norm(model, ex), 0.0);
  EXPECT_GT(gradient_norm(model, {{0.0, 0.0}, 0}), 0.0);
}

TEST(Trajectory, AbstractNominalAndOracleRunsAgreeBitForBit) {
  const Fixture f = blobs_fixture();
  const auto& train_set = f.data.train.examples;
  std::vector<std::uint64_t> a, b, c;
  train(train_set, f.widths, f.cfg, PerturbationModel::none(),
        [&](std::size_t, const ParamBox& box) { a.push_back(parameter_hash(box.nominal())); });
  train_nominal(train_set, f.widths, f.cfg, [&](std::size_t, const Mlp& m) { b.push_back(parameter_hash(m)); });
  retrain_perturbed(train_set, PerturbedDataset{}, f.widths, f.cfg,
                    [&](std::size_t, const Mlp& m) { c.push_back(parameter_hash(m)); });
  EXPECT_EQ(a.size(), 3u * (train_set.size() / 60));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Soundness, ZeroBudgetPointBoxHasNoViolations) {
  const Fixture f = blobs_fixture();
  const ParamBox box = train(f.data.train.examples, f.widths, f.cfg, PerturbationModel::none());
  TrialPlan plan;
  plan.random_trials = 10;
  plan.adversarial_trials = 2;
  const auto report =
      soundness_trial(f.data.train.examples, f.widths, f.cfg, PerturbationModel::none(), box, f.pool, plan);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_EQ(report.worst_excess, 0.0);
}

TEST(Soundness, NoViolationsOnBlobs) {
  const Fixture f = blobs_fixture();
  for (auto pm : {PerturbationModel::privacy(2), PerturbationModel::unlearning(5)}) {
    const ParamBox box = train(f.data.train.examples, f.widths, f.cfg, pm);
    TrialPlan plan;
    plan.random_trials = 60;
    plan.adversarial_trials = 20;
    plan.seed = 4;
    const auto report = soundness_trial(f.data.train.examples, f.widths, f.cfg, pm, box, f.pool, plan);
    EXPECT_EQ(report.trials.size(), 80u);
    EXPECT_EQ(report.violations, 0u) << "worst excess " << report.worst_excess;
  }
}

TEST(Soundness, MismatchedBoxIsAnInvalidTrial) {
  const Fixture f = blobs_fixture();
  TrainConfig other = f.cfg;
  other.init_seed += 1;
  const ParamBox box = train(f.data.train.examples, f.widths, other, PerturbationModel::privacy(1));
  EXPECT_THROW(soundness_trial(f.data.train.examples, f.widths, f.cfg, PerturbationModel::privacy(1), box,
                               f.pool, TrialPlan{}),
               ConfigError);
}

// A short run with saturated clipping, where edits push the parameters more
// than halfway to the box edge; halving the box must be detected.
TEST(Soundness, HalvedBoxIsCaught) {
  Fixture f = blobs_fixture(300, 64);
  f.cfg.epochs = 2;
  f.cfg.lr = 0.1;
  f.cfg.batch_size = 120;
  f.cfg.clip = 0.1;
  const auto pm = PerturbationModel::privacy(5);
  const ParamBox box = train(f.data.train.examples, f.widths, f.cfg, pm);
  TrialPlan plan;
  plan.random_trials = 40;
  plan.adversarial_trials = 20;
  plan.seed = 11;
  const auto sound = soundness_trial(f.data.train.examples, f.widths, f.cfg, pm, box, f.pool, plan);
  EXPECT_EQ(sound.violations, 0u);
  const auto report =
      soundness_trial(f.data.train.examples, f.widths, f.cfg, pm, box.shrunk(0.5), f.pool, plan);
  EXPECT_GT(report.violations, 0u);
}

TEST(Soundness, AdversarialTrialsReachFurtherThanRandomOnes) {
  const Fixture f = blobs_fixture();
  const auto pm = PerturbationModel::privacy(5);
  const auto& train_set = f.data.train.examples;
  const ParamBox box = train(train_set, f.widths, f.cfg, pm);
  const Mlp reference = box.nominal();
  double random_reach = 0.0, adversarial_reach = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    PerturbOptions opt;
    opt.scorer = &reference;
    const auto r = perturb_dataset(train_set, pm, mix_seed(5, t), f.pool, f.cfg.batch_size, opt);
    random_reach = std::max(random_reach, reach(box, retrain_perturbed(train_set, r, f.widths, f.cfg)));
    opt.kind = TrialKind::kAdversarial;
    const auto a = perturb_dataset(train_set, pm, mix_seed(5, t), f.pool, f.cfg.batch_size, opt);
    adversarial_reach = std::max(adversarial_reach, reach(box, retrain_perturbed(train_set, a, f.widths, f.cfg)));
  }
  EXPECT_GT(adversarial_reach, random_reach);
  EXPECT_LE(adversarial_reach, 1.0 + 1e-9);
}

TEST(TrialCsv, OneRowPerTrial) {
  SoundnessReport report;
  report.trials.push_back({7, TrialKind::kRandom, 1, 2, 0.0, false});
  report.trials.push_back({8, TrialKind::kAdversarial, 3, 3, 0.5, true});
  std::ostringstream out;
  write_trial_csv_header(out);
  write_trial_csv(out, 3, report);
  EXPECT_EQ(out.str(),
            "k,trial_seed,kind,removals,additions,max_excess,violated\n"
            "3,7,random,1,2,0,0\n"
            "3,8,adversarial,3,3,0.5,1\n");
}

TEST(Micro, ZeroBudgetHasZeroSensitivity) {
  const auto data = micro_data();
  const std::vector<std::size_t> widths{2, 3, 2};
  EXPECT_EQ(exhaustive_micro_sensitivity(data, widths, micro_config(), PerturbationModel::none(),
                                         std::vector<double>{0.0, 0.0}, {}),
            0);
}

TEST(Micro, RejectsLargeInstances) {
  auto data = micro_data();
  data.push_back({{3.0, 0.0}, 1});
  const std::vector<std::size_t> widths{2, 3, 2};
  EXPECT_THROW(exhaustive_micro_sensitivity(data, widths, micro_config(), PerturbationModel::unlearning(1),
                                            std::vector<double>{0.0, 0.0}, {}),
               ConfigError);
}

TEST(Micro, FarQueryIsStableAndBoundaryQueryFlips) {
  const auto data = micro_data();
  const std::vector<std::size_t> widths{2, 3, 2};
  TrainConfig cfg = micro_config();
  const std::vector<LabeledExample> pool{{{-2.0, 0.0}, 1}, {{2.0, 0.0}, 0}};
  const auto pm = PerturbationModel::privacy(1);
  const Mlp nominal = train_nominal(data, widths, cfg);
  EXPECT_EQ(exhaustive_micro_sensitivity(data, widths, cfg, pm, std::vector<double>{40.0, 0.0}, pool), 0);

  // Walk the segment between the class means to the nominal decision boundary.
  double lo = -2.0, hi = 2.0;
  const int left = argmax(predict_logits(nominal, std::vector<double>{lo, 0.0}));
  ASSERT_NE(left, argmax(predict_logits(nominal, std::vector<double>{hi, 0.0})));
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (argmax(predict_logits(nominal, std::vector<double>{mid, 0.0})) == left ? lo : hi) = mid;
  }
  EXPECT_EQ(exhaustive_micro_sensitivity(data, widths, cfg, pm, std::vector<double>{lo, 0.0}, pool), 1);
}

// Whenever the abstract box certifies a query, no edit in the budget can
// change its prediction.
TEST(Micro, CertificatesNeverContradictExhaustiveSearch) {
  Gen gen(71);
  const std::vector<std::size_t> widths{2, 3, 2};
  std::size_t certified = 0;
  for (int t = 0; t < 12; ++t) {
    std::vector<LabeledExample> data;
    for (int i = 0; i < 8; ++i) {
      const int y = i % 2;
      data.push_back({{gen.uniform(-1.0, 1.0) + (y ? 2.0 : -2.0), gen.uniform(-1.0, 1.0)}, y});
    }
    TrainConfig cfg = micro_config();
    cfg.lr = 0.1;
    cfg.clip = 0.5;
    cfg.init_seed = static_cast<std::uint64_t>(t);
    const std::vector<LabeledExample> pool{{gen.vector(2, -3.0, 3.0), 0}, {gen.vector(2, -3.0, 3.0), 1}};
    for (auto pm : {PerturbationModel::privacy(1), PerturbationModel::unlearning(2)}) {
      const ParamBox box = train(data, widths, cfg, pm);
      for (int q = 0; q < 6; ++q) {
        const auto x = gen.vector(2, -8.0, 8.0);
        if (!is_safe(box, x).certified) continue;
        ++certified;
        ASSERT_EQ(exhaustive_micro_sensitivity(data, widths, cfg, pm, x, pool), 0) << "instance " << t;
      }
    }
  }
  EXPECT_GT(certified, 10u);
}

}  // namespace
}  // namespace agt
