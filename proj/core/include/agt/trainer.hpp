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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "agt/mlp.hpp"
#include "agt/param_box.hpp"

namespace agt {

enum class PerturbationMode { kPrivacy, kUnlearning };

std::string to_string(PerturbationMode mode);
/// Accepts "privacy" or "unlearning"; throws ConfigError otherwise.
PerturbationMode parse_perturbation_mode(const std::string& text);

/// Budget of dataset edits the parameter box must cover.
/// Privacy: up to k additions and k removals. Unlearning: up to k removals.
struct PerturbationModel {
  std::size_t k_add = 0;
  std::size_t k_remove = 0;
  PerturbationMode mode = PerturbationMode::kPrivacy;

  static PerturbationModel none() { return {}; }
  static PerturbationModel privacy(std::size_t k) { return {k, k, PerturbationMode::kPrivacy}; }
  static PerturbationModel unlearning(std::size_t k) { return {0, k, PerturbationMode::kUnlearning}; }
  static PerturbationModel for_mode(PerturbationMode mode, std::size_t k) {
    return mode == PerturbationMode::kPrivacy ? privacy(k) : unlearning(k);
  }

  std::size_t k() const noexcept { return k_remove; }
  /// Throws ConfigError if the mode invariants do not hold.
  void validate() const;

  bool operator==(const PerturbationModel&) const = default;
};

struct TrainConfig {
  std::size_t epochs = 1;
  double lr = 0.1;
  double lr_decay = 0.0;
  std::size_t batch_size = 1;
  double clip = 1.0;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t init_seed = 0;

  /// alpha / (1 + eta * epoch).
  double learning_rate(std::size_t epoch) const;
  /// Throws ConfigError unless epochs, lr, batch size and clip are positive,
  /// lr_decay >= 0, batch_size <= dataset_size and batch_size - k_remove >= 1.
  void validate(std::size_t dataset_size, const PerturbationModel& pm) const;

  bool operator==(const TrainConfig&) const = default;
};

/// Batches for one epoch: a Fisher-Yates shuffle of 0..n-1 driven by
/// Rng(mix_seed(shuffle_seed, epoch)), cut into consecutive runs of
/// batch_size. A trailing partial batch is dropped.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size,
                                                    std::uint64_t shuffle_seed, std::size_t epoch);

/// Per coordinate j, the sum of the a largest rows[i][j]. Requires
/// 1 <= a <= rows.size() and equal row lengths.
std::vector<double> semax(std::span<const std::vector<double>> rows, std::size_t a);
/// Per coordinate j, the sum of the a smallest rows[i][j].
std::vector<double> semin(std::span<const std::vector<double>> rows, std::size_t a);

/// Mean of elementwise-clipped per-example gradients, summed in batch order.
Gradients mean_clipped_gradient(const Mlp& model, std::span<const LabeledExample* const> batch,
                                double gamma);

/// theta <- theta - lr * mean_clipped_gradient(theta, batch). Shared by
/// nominal training, abstract training and the retraining oracle.
void sgd_step(Mlp& model, std::span<const LabeledExample* const> batch, double lr, double gamma);

/// Flat elementwise bounds on the descent direction (layout of agt::flatten()).
struct DescentBounds {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Bounds the mean clipped gradient over every batch obtained from the
/// nominal one by removing up to k_remove and adding up to k_add examples,
/// for every parameter in the box:
///   lo = (semin_{b-kr}{delta_lo} - ka * gamma) / (b - kr + ka)
///   hi = (semax_{b-kr}{delta_hi} + ka * gamma) / (b - kr + ka)
/// where [delta_lo, delta_hi] are clipped interval gradients per example.
DescentBounds bound_descent_direction(std::span<const LabeledExample* const> batch,
                                      const ParamBox& box, const PerturbationModel& pm,
                                      const TrainConfig& cfg);
DescentBounds bound_descent_direction(std::span<const LabeledExample> batch, const ParamBox& box,
                                      const PerturbationModel& pm, const TrainConfig& cfg);

/// Called after every parameter update with a 0-based global step index.
using BoxObserver = std::function<void(std::size_t step, const ParamBox& box)>;
using ModelObserver = std::function<void(std::size_t step, const Mlp& model)>;

/// Abstract gradient training. Runs clipped mini-batch SGD from
/// Mlp::he_uniform(widths, cfg.init_seed) and, alongside it, maintains a box
/// that contains the SGD result for every dataset within the perturbation
/// budget (same initialisation, ordering and schedule).
ParamBox train(std::span<const LabeledExample> data, std::span<const std::size_t> widths,
               const TrainConfig& cfg, const PerturbationModel& pm,
               const BoxObserver& observer = {});

/// The same SGD without bounds.
Mlp train_nominal(std::span<const LabeledExample> data, std::span<const std::size_t> widths,
                  const TrainConfig& cfg, const ModelObserver& observer = {});

}  // namespace agt
