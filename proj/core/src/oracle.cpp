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
#include "agt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>

#include "agt/errors.hpp"
#include "agt/random.hpp"

namespace agt {
namespace {

// Draws m distinct entries of candidates in sorted order.
std::vector<std::size_t> sample_distinct(std::vector<std::size_t> candidates, std::size_t m,
                                         Rng& rng) {
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(m);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

void for_each_combination(std::size_t n, std::size_t k, std::vector<std::size_t>& current,
                          std::size_t start, const std::function<bool()>& visit, bool& stop) {
  if (stop) return;
  if (current.size() == k) {
    stop = visit();
    return;
  }
  for (std::size_t i = start; i < n && !stop; ++i) {
    current.push_back(i);
    for_each_combination(n, k, current, i + 1, visit, stop);
    current.pop_back();
  }
}

}  // namespace

std::string to_string(TrialKind kind) {
  return kind == TrialKind::kRandom ? "random" : "adversarial";
}

double gradient_norm(const Mlp& model, const LabeledExample& example) {
  const ForwardCache cache = forward(model, example.x);
  const LossGrad lg = ce_loss_grad(cache.logits(), example.label);
  const Gradients grads = backward(model, cache, lg.dlogits);
  double total = 0.0;
  for (double g : flatten(grads)) total += g * g;
  return std::sqrt(total);
}

PerturbedDataset perturb_dataset(std::span<const LabeledExample> data, const PerturbationModel& pm,
                                 std::uint64_t trial_seed, std::span<const LabeledExample> pool,
                                 std::size_t batch_size, const PerturbOptions& options) {
  pm.validate();
  if (pm.k_remove >= batch_size) {
    throw ConfigError("perturb_dataset: k_remove must be below the batch size");
  }
  if (data.size() < pm.k_remove || data.size() - pm.k_remove <= batch_size) {
    throw ConfigError("perturb_dataset: removing " + std::to_string(pm.k_remove) + " of " +
                      std::to_string(data.size()) + " examples leaves no more than one batch of " +
                      std::to_string(batch_size));
  }
  if (pm.k_add > 0 && pool.empty()) {
    throw ConfigError("perturb_dataset: k_add > 0 but the candidate pool is empty");
  }
  const bool adversarial = options.kind == TrialKind::kAdversarial;
  if (adversarial && options.scorer == nullptr) {
    throw ConfigError("perturb_dataset: adversarial trials need a scorer model");
  }

  Rng rng(mix_seed(trial_seed, 0));
  const std::size_t n_remove =
      options.full_budget ? pm.k_remove : rng.index(pm.k_remove + 1);
  const std::size_t n_add = options.full_budget ? pm.k_add : rng.index(pm.k_add + 1);

  PerturbedDataset edit;
  if (adversarial) {
    // Push one parameter coordinate in one direction: drop the examples
    // whose clipped gradient pulls hardest against it and add the pool
    // points that pull hardest towards it.
    const std::size_t n_params = options.scorer->parameter_count();
    const std::size_t coord = rng.index(n_params);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    auto score = [&](const LabeledExample& ex) {
      const ForwardCache cache = forward(*options.scorer, ex.x);
      const LossGrad lg = ce_loss_grad(cache.logits(), ex.label);
      const double g = flatten(backward(*options.scorer, cache, lg.dlogits))[coord];
      return sign * g;
    };
    auto ranked = [&](std::span<const LabeledExample> items, bool ascending) {
      std::vector<double> scores(items.size());
      for (std::size_t i = 0; i < items.size(); ++i) scores[i] = score(items[i]);
      std::vector<std::size_t> order = all_indices(items.size());
      std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return ascending ? scores[l] < scores[r] : scores[l] > scores[r];
      });
      return order;
    };
    if (n_remove > 0) {
      std::vector<std::size_t> order = ranked(data, true);
      order.resize(n_remove);
      std::sort(order.begin(), order.end());
      edit.removed = std::move(order);
    }
    if (n_add > 0) {
      const std::size_t best = ranked(pool, false).front();
      edit.added.assign(n_add, pool[best]);
    }
  } else {
    if (n_remove > 0) edit.removed = sample_distinct(all_indices(data.size()), n_remove, rng);
    for (std::size_t j = 0; j < n_add; ++j) edit.added.push_back(pool[rng.index(pool.size())]);
  }
  edit.placement_seed = mix_seed(trial_seed, 1);
  return edit;
}

Mlp retrain_perturbed(std::span<const LabeledExample> data, const PerturbedDataset& edit,
                      std::span<const std::size_t> widths, const TrainConfig& cfg,
                      const ModelObserver& observer) {
  cfg.validate(data.size(), PerturbationModel::none());
  std::vector<char> removed(data.size(), 0);
  for (std::size_t i : edit.removed) {
    if (i >= data.size()) throw std::out_of_range("retrain_perturbed: removed index out of range");
    removed[i] = 1;
  }
  if (!edit.placement_seed && edit.fixed_slots.size() != edit.added.size()) {
    throw ConfigError("retrain_perturbed: additions need a placement seed or one slot each");
  }

  Mlp model = Mlp::he_uniform(widths, cfg.init_seed);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate(epoch);
    const auto batches = epoch_batches(data.size(), cfg.batch_size, cfg.shuffle_seed, epoch);
    std::vector<std::size_t> slot(edit.added.size());
    if (edit.placement_seed) {
      Rng rng(mix_seed(*edit.placement_seed, epoch));
      for (auto& s : slot) s = rng.index(batches.size());
    } else {
      for (std::size_t j = 0; j < slot.size(); ++j) slot[j] = edit.fixed_slots[j] % batches.size();
    }
    for (std::size_t t = 0; t < batches.size(); ++t) {
      std::vector<const LabeledExample*> batch;
      batch.reserve(batches[t].size() + edit.added.size());
      for (std::size_t i : batches[t])
        if (!removed[i]) batch.push_back(&data[i]);
      for (std::size_t j = 0; j < edit.added.size(); ++j)
        if (slot[j] == t) batch.push_back(&edit.added[j]);
      if (!batch.empty()) sgd_step(model, batch, lr, cfg.clip);
      if (observer) observer(step, model);
      ++step;
    }
  }
  return model;
}

std::vector<LabeledExample> make_candidate_pool(std::span<const LabeledExample> train,
                                                std::span<const LabeledExample> held_out) {
  std::vector<LabeledExample> pool(held_out.begin(), held_out.end());
  if (train.empty()) return pool;
  const std::size_t d = train.front().x.size();
  std::vector<double> mean[2] = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::size_t count[2] = {0, 0};
  for (const auto& ex : train) {
    if (ex.label != 0 && ex.label != 1) continue;
    for (std::size_t j = 0; j < d; ++j) mean[ex.label][j] += ex.x[j];
    ++count[ex.label];
  }
  if (count[0] == 0 || count[1] == 0) return pool;
  for (int c = 0; c < 2; ++c)
    for (double& v : mean[c]) v /= static_cast<double>(count[c]);
  for (int c = 0; c < 2; ++c) {
    for (double s : {1.0, 3.0}) {
      Vector x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = mean[c][j] + s * (mean[c][j] - mean[1 - c][j]);
      pool.push_back({x, 0});
      pool.push_back({x, 1});
    }
  }
  return pool;
}

SoundnessReport soundness_trial(std::span<const LabeledExample> data,
                                std::span<const std::size_t> widths, const TrainConfig& cfg,
                                const PerturbationModel& pm, const ParamBox& box,
                                std::span<const LabeledExample> pool, const TrialPlan& plan) {
  const Mlp reference = retrain_perturbed(data, PerturbedDataset{}, widths, cfg);
  if (!(reference == box.nominal())) {
    throw ConfigError(
        "invalid trial: retraining the unperturbed data does not reproduce the box's nominal model");
  }

  SoundnessReport report;
  const std::size_t total = plan.random_trials + plan.adversarial_trials;
  for (std::size_t t = 0; t < total; ++t) {
    PerturbOptions options;
    options.kind = t < plan.random_trials ? TrialKind::kRandom : TrialKind::kAdversarial;
    options.scorer = &reference;
    // Half of the random trials spend the whole budget; the rest draw counts.
    options.full_budget = options.kind == TrialKind::kAdversarial || t % 2 == 0;
    const std::uint64_t trial_seed = mix_seed(plan.seed, t);
    const PerturbedDataset edit =
        perturb_dataset(data, pm, trial_seed, pool, cfg.batch_size, options);
    const Mlp model = retrain_perturbed(data, edit, widths, cfg);

    TrialRecord record;
    record.trial_seed = trial_seed;
    record.kind = options.kind;
    record.removals = edit.removals();
    record.additions = edit.additions();
    record.max_excess = box.max_excess(model);
    record.violated = record.max_excess > plan.tolerance;
    report.worst_excess = std::max(report.worst_excess, record.max_excess);
    if (record.violated) ++report.violations;
    report.trials.push_back(record);
  }
  return report;
}

int exhaustive_micro_sensitivity(std::span<const LabeledExample> data,
                                 std::span<const std::size_t> widths, const TrainConfig& cfg,
                                 const PerturbationModel& pm, std::span<const double> x,
                                 std::span<const LabeledExample> pool) {
  if (data.size() > kMaxMicroInstance) {
    throw ConfigError("exhaustive_micro_sensitivity: instance has " + std::to_string(data.size()) +
                      " examples, limit is " + std::to_string(kMaxMicroInstance));
  }
  pm.validate();
  cfg.validate(data.size(), pm);
  if (pm.k_add > 0 && pool.empty()) {
    throw ConfigError("exhaustive_micro_sensitivity: k_add > 0 but the candidate pool is empty");
  }
  const int baseline = argmax(predict_logits(train_nominal(data, widths, cfg), x));
  const std::size_t n_batches = data.size() / cfg.batch_size;

  bool changed = false;
  std::vector<std::size_t> removal;
  for (std::size_t r = 0; r <= pm.k_remove && !changed; ++r) {
    bool stop = false;
    for_each_combination(data.size(), r, removal, 0, [&] {
      for (std::size_t a = 0; a <= pm.k_add; ++a) {
        // Additions are a multiset of pool points with a batch slot each,
        // enumerated as a mixed-radix counter over (pool index, slot) pairs.
        const std::size_t radix = pool.size() * n_batches;
        std::vector<std::size_t> digits(a, 0);
        while (true) {
          bool canonical = true;
          for (std::size_t j = 1; j < a; ++j) canonical = canonical && digits[j - 1] <= digits[j];
          if (canonical) {
            PerturbedDataset edit;
            edit.removed = removal;
            for (std::size_t d : digits) {
              edit.added.push_back(pool[d / n_batches]);
              edit.fixed_slots.push_back(d % n_batches);
            }
            const Mlp model = retrain_perturbed(data, edit, widths, cfg);
            if (argmax(predict_logits(model, x)) != baseline) return true;
          }
          std::size_t j = 0;
          while (j < a && ++digits[j] == radix) digits[j++] = 0;
          if (j == a) break;
        }
      }
      return false;
    }, stop);
    changed = stop;
  }
  return changed ? 1 : 0;
}

std::uint64_t parameter_hash(const Mlp& model, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (double v : flatten(model.layers())) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_trial_csv_header(std::ostream& out) {
  out << "k,trial_seed,kind,removals,additions,max_excess,violated\n";
}

void write_trial_csv(std::ostream& out, std::size_t k, const SoundnessReport& report) {
  char buffer[64];
  for (const TrialRecord& r : report.trials) {
    std::snprintf(buffer, sizeof buffer, "%.17g", r.max_excess);
    out << k << ',' << r.trial_seed << ',' << to_string(r.kind) << ',' << r.removals << ','
        << r.additions << ',' << buffer << ',' << (r.violated ? 1 : 0) << '\n';
  }
}

}  // namespace agt
