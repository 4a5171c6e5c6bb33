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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agt/mlp.hpp"
#include "agt/param_box.hpp"
#include "agt/trainer.hpp"

namespace agt {

enum class TrialKind { kRandom, kAdversarial };
std::string to_string(TrialKind kind);

/// A dataset edit expressed against the original, ordered data.
///
/// Retraining keeps the original epoch batches: removed examples drop out
/// of whichever batch they land in, and each added example joins one batch
/// per epoch. With placement_seed set, that batch is drawn from
/// Rng(mix_seed(placement_seed, epoch)); otherwise fixed_slots[j] (modulo the
/// batch count) is used in every epoch.
struct PerturbedDataset {
  std::vector<std::size_t> removed;  // sorted indices into the original data
  std::vector<LabeledExample> added;
  std::optional<std::uint64_t> placement_seed;
  std::vector<std::size_t> fixed_slots;

  std::size_t removals() const noexcept { return removed.size(); }
  std::size_t additions() const noexcept { return added.size(); }
};

struct PerturbOptions {
  TrialKind kind = TrialKind::kRandom;
  /// Model whose gradients steer adversarial trials.
  const Mlp* scorer = nullptr;
  /// Use the full budget (exactly k_remove / k_add edits) instead of a
  /// uniformly drawn count in [0, k].
  bool full_budget = true;
};

/// Samples an edit within the budget of pm. Random trials remove uniformly
/// chosen examples and add uniformly chosen pool points. Adversarial trials
/// pick one parameter coordinate and a sign, remove the examples whose
/// gradient under options.scorer opposes that direction most, and add copies
/// of the pool point that pushes hardest along it.
/// Throws ConfigError if the pool is empty while k_add > 0, if an
/// adversarial trial has no scorer, or unless
/// |data| - k_remove > batch_size > k_remove.
PerturbedDataset perturb_dataset(std::span<const LabeledExample> data, const PerturbationModel& pm,
                                 std::uint64_t trial_seed, std::span<const LabeledExample> pool,
                                 std::size_t batch_size, const PerturbOptions& options = {});

/// Nominal clipped SGD on the perturbed data, with the same initialisation,
/// epoch ordering, learning-rate schedule and clipping as train().
Mlp retrain_perturbed(std::span<const LabeledExample> data, const PerturbedDataset& edit,
                      std::span<const std::size_t> widths, const TrainConfig& cfg,
                      const ModelObserver& observer = {});

/// Held-out real points plus synthetic extremes: for each class centroid
/// mu_c, the points mu_c + s (mu_c - mu_other) for s in {1, 3}, each with
/// both labels.
std::vector<LabeledExample> make_candidate_pool(std::span<const LabeledExample> train,
                                                std::span<const LabeledExample> held_out);

double gradient_norm(const Mlp& model, const LabeledExample& example);

struct TrialRecord {
  std::uint64_t trial_seed = 0;
  TrialKind kind = TrialKind::kRandom;
  std::size_t removals = 0;
  std::size_t additions = 0;
  double max_excess = 0.0;
  bool violated = false;
};

struct SoundnessReport {
  std::vector<TrialRecord> trials;
  std::size_t violations = 0;
  double worst_excess = 0.0;
};

struct TrialPlan {
  std::size_t random_trials = 200;
  std::size_t adversarial_trials = 20;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

/// Retrains on sampled perturbed datasets and checks each result against
/// the box. Throws ConfigError ("invalid trial") if retraining the
/// unperturbed data does not reproduce box.nominal() bit for bit.
SoundnessReport soundness_trial(std::span<const LabeledExample> data,
                                std::span<const std::size_t> widths, const TrainConfig& cfg,
                                const PerturbationModel& pm, const ParamBox& box,
                                std::span<const LabeledExample> pool, const TrialPlan& plan);

/// Largest dataset exhaustive_micro_sensitivity accepts.
inline constexpr std::size_t kMaxMicroInstance = 8;

/// Exact local sensitivity (0 or 1) of the prediction at x over every edit
/// with at most k_remove removals and k_add additions drawn from pool, each
/// added point pinned to one batch slot for all epochs. Throws ConfigError
/// when data has more than kMaxMicroInstance examples.
int exhaustive_micro_sensitivity(std::span<const LabeledExample> data,
                                 std::span<const std::size_t> widths, const TrainConfig& cfg,
                                 const PerturbationModel& pm, std::span<const double> x,
                                 std::span<const LabeledExample> pool);

/// FNV-1a over the raw bytes of every parameter, in flatten() order.
std::uint64_t parameter_hash(const Mlp& model, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// CSV rows: k,trial_seed,kind,removals,additions,max_excess,violated
void write_trial_csv_header(std::ostream& out);
void write_trial_csv(std::ostream& out, std::size_t k, const SoundnessReport& report);

}  // namespace agt
