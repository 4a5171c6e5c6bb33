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
#include "agt/trainer.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <string>

#include "agt/bound_prop.hpp"
#include "agt/errors.hpp"
#include "agt/random.hpp"

namespace agt {
namespace {

constexpr std::size_t kBuffer = 32;

// The m-th entry counted from the excluded end (the smallest when the
// largest entries are selected), kept in a sorted buffer of m <= kBuffer.
double threshold_by_buffer(const double* column, std::size_t b, std::size_t m, bool largest,
                           double* buffer) {
  const auto outer = [largest](double x, double y) { return largest ? x < y : x > y; };
  std::size_t count = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const double v = column[i];
    if (count == m && !outer(v, buffer[m - 1])) continue;
    std::size_t pos = count < m ? count++ : m - 1;
    while (pos > 0 && outer(v, buffer[pos - 1])) {
      buffer[pos] = buffer[pos - 1];
      --pos;
    }
    buffer[pos] = v;
  }
  return buffer[m - 1];
}

double threshold_by_select(const double* column, std::size_t b, std::size_t a, bool largest,
                           std::vector<double>& scratch) {
  std::copy(column, column + b, scratch.begin());
  const auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(a - 1);
  if (largest) {
    std::nth_element(scratch.begin(), nth, scratch.end(), std::greater<>());
  } else {
    std::nth_element(scratch.begin(), nth, scratch.end());
  }
  return *nth;
}

// Sum of the a selected entries of each of d columns stored contiguously
// (column j occupies data[j * b, (j + 1) * b)). Selection keeps the largest
// (largest == true) or smallest values. With a == b this is the plain sum in
// row order; otherwise entries strictly beyond the threshold are summed in
// row order and the threshold is added once per tie taken.
std::vector<double> select_sum_columns(const double* data, std::size_t d, std::size_t b, std::size_t a,
                                       bool largest) {
  std::vector<double> out(d, 0.0);
  if (a == b) {
    for (std::size_t j = 0; j < d; ++j) {
      const double* column = data + j * b;
      double total = 0.0;
      for (std::size_t i = 0; i < b; ++i) total += column[i];
      out[j] = total;
    }
    return out;
  }
  const std::size_t excluded = b - a;
  std::vector<double> scratch(b);
  std::array<double, kBuffer> buffer{};
  for (std::size_t j = 0; j < d; ++j) {
    const double* column = data + j * b;
    const double threshold = excluded + 1 <= kBuffer
                                 ? threshold_by_buffer(column, b, excluded + 1, largest, buffer.data())
                                 : threshold_by_select(column, b, a, largest, scratch);
    std::size_t beyond = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double v = column[i];
      if (largest ? v > threshold : v < threshold) {
        total += v;
        ++beyond;
      }
    }
    for (std::size_t t = beyond; t < a; ++t) total += threshold;
    out[j] = total;
  }
  return out;
}

std::vector<double> select_sum(std::span<const std::vector<double>> rows, std::size_t a, bool largest,
                               const char* name) {
  const std::size_t b = rows.size();
  if (a < 1 || a > b) {
    throw std::out_of_range(std::string(name) + ": a = " + std::to_string(a) + " outside [1, " +
                            std::to_string(b) + "]");
  }
  const std::size_t d = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != d) throw DimensionError(std::string(name) + ": rows differ in length");
  }
  std::vector<double> columns(d * b);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < d; ++j) columns[j * b + i] = rows[i][j];
  return select_sum_columns(columns.data(), d, b, a, largest);
}

ParamBox box_from_flat(const Mlp& nominal, std::span<const double> lo, std::span<const double> hi) {
  std::vector<DenseLayer> lo_layers = nominal.layers();
  std::vector<DenseLayer> hi_layers = nominal.layers();
  unflatten_into(lo, lo_layers);
  unflatten_into(hi, hi_layers);
  std::vector<IntervalLayer> bounds;
  bounds.reserve(lo_layers.size());
  for (std::size_t k = 0; k < lo_layers.size(); ++k) {
    bounds.push_back({IntervalTensor(std::move(lo_layers[k].weight), std::move(hi_layers[k].weight)),
                      IntervalTensor(std::move(lo_layers[k].bias), std::move(hi_layers[k].bias))});
  }
  return ParamBox(nominal, std::move(bounds));
}

std::vector<const LabeledExample*> gather(std::span<const LabeledExample> data,
                                          std::span<const std::size_t> indices) {
  std::vector<const LabeledExample*> batch;
  batch.reserve(indices.size());
  for (std::size_t i : indices) batch.push_back(&data[i]);
  return batch;
}

}  // namespace

std::string to_string(PerturbationMode mode) {
  return mode == PerturbationMode::kPrivacy ? "privacy" : "unlearning";
}

PerturbationMode parse_perturbation_mode(const std::string& text) {
  if (text == "privacy") return PerturbationMode::kPrivacy;
  if (text == "unlearning") return PerturbationMode::kUnlearning;
  throw ConfigError("unknown perturbation mode '" + text + "' (expected privacy or unlearning)");
}

void PerturbationModel::validate() const {
  if (mode == PerturbationMode::kPrivacy && k_add != k_remove) {
    throw ConfigError("privacy perturbation requires k_add == k_remove");
  }
  if (mode == PerturbationMode::kUnlearning && k_add != 0) {
    throw ConfigError("unlearning perturbation requires k_add == 0");
  }
}

double TrainConfig::learning_rate(std::size_t epoch) const {
  return lr / (1.0 + lr_decay * static_cast<double>(epoch));
}

void TrainConfig::validate(std::size_t dataset_size, const PerturbationModel& pm) const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(lr_decay >= 0.0)) throw ConfigError("lr_decay must be non-negative");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(clip > 0.0)) throw ConfigError("clip must be positive");
  if (batch_size > dataset_size) {
    throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds dataset size " +
                      std::to_string(dataset_size));
  }
  if (pm.k_remove >= batch_size) {
    throw ConfigError("batch_size - k_remove must be at least 1");
  }
  pm.validate();
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size,
                                                    std::uint64_t shuffle_seed, std::size_t epoch) {
  if (batch_size == 0) throw ConfigError("epoch_batches: batch_size must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(shuffle_seed, epoch));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start + batch_size <= n; start += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + batch_size));
  }
  return batches;
}

std::vector<double> semax(std::span<const std::vector<double>> rows, std::size_t a) {
  return select_sum(rows, a, true, "semax");
}

std::vector<double> semin(std::span<const std::vector<double>> rows, std::size_t a) {
  return select_sum(rows, a, false, "semin");
}

Gradients mean_clipped_gradient(const Mlp& model, std::span<const LabeledExample* const> batch,
                                double gamma) {
  if (batch.empty()) throw std::invalid_argument("mean_clipped_gradient: empty batch");
  Gradients total = zeros_like(model);
  for (const LabeledExample* example : batch) {
    const ForwardCache cache = forward(model, example->x);
    Gradients g = backward(model, cache, ce_loss_grad(cache.logits(), example->label).dlogits);
    clip_in_place(g, gamma);
    for (std::size_t k = 0; k < g.size(); ++k) {
      for (std::size_t i = 0; i < g[k].weight.size(); ++i) total[k].weight[i] += g[k].weight[i];
      for (std::size_t i = 0; i < g[k].bias.size(); ++i) total[k].bias[i] += g[k].bias[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (DenseLayer& layer : total) {
    for (double& v : layer.weight.values()) v *= inv;
    for (double& v : layer.bias.values()) v *= inv;
  }
  return total;
}

void sgd_step(Mlp& model, std::span<const LabeledExample* const> batch, double lr, double gamma) {
  const Gradients step = mean_clipped_gradient(model, batch, gamma);
  auto& layers = model.mutable_layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (std::size_t i = 0; i < step[k].weight.size(); ++i) layers[k].weight[i] -= lr * step[k].weight[i];
    for (std::size_t i = 0; i < step[k].bias.size(); ++i) layers[k].bias[i] -= lr * step[k].bias[i];
  }
}

DescentBounds bound_descent_direction(std::span<const LabeledExample* const> batch,
                                      const ParamBox& box, const PerturbationModel& pm,
                                      const TrainConfig& cfg) {
  pm.validate();
  if (batch.size() != cfg.batch_size) {
    throw DimensionError("bound_descent_direction: batch has " + std::to_string(batch.size()) +
                         " examples, config says " + std::to_string(cfg.batch_size));
  }
  if (pm.k_remove >= batch.size()) {
    throw ConfigError("bound_descent_direction: batch_size - k_remove must be at least 1");
  }
  if (!(cfg.clip > 0.0)) throw ConfigError("bound_descent_direction: clip must be positive");

  // Per-example bounds, stored column-major: coordinate j of example e sits
  // at [j * b + e].
  const std::size_t b = batch.size();
  const std::size_t d = box.nominal().parameter_count();
  std::vector<double> lower(d * b);
  std::vector<double> upper(d * b);
  for (std::size_t e = 0; e < b; ++e) {
    const LabeledExample* example = batch[e];
    const GradBounds g = interval_backward(box, interval_forward(box, example->x), example->label);
    std::size_t j = 0;
    for (const IntervalLayer& layer : g) {
      for (const IntervalTensor* t : {&layer.weight, &layer.bias}) {
        const double* lo = t->lo().values().data();
        const double* hi = t->hi().values().data();
        for (std::size_t i = 0; i < t->size(); ++i, ++j) {
          lower[j * b + e] = std::clamp(lo[i], -cfg.clip, cfg.clip);
          upper[j * b + e] = std::clamp(hi[i], -cfg.clip, cfg.clip);
        }
      }
    }
  }

  const std::size_t kept = batch.size() - pm.k_remove;
  const double added = static_cast<double>(pm.k_add) * cfg.clip;
  const double inv = 1.0 / static_cast<double>(kept + pm.k_add);
  DescentBounds out{select_sum_columns(lower.data(), d, b, kept, false),
                    select_sum_columns(upper.data(), d, b, kept, true)};
  for (double& v : out.lo) v = (v - added) * inv;
  for (double& v : out.hi) v = (v + added) * inv;
  return out;
}

DescentBounds bound_descent_direction(std::span<const LabeledExample> batch, const ParamBox& box,
                                      const PerturbationModel& pm, const TrainConfig& cfg) {
  std::vector<const LabeledExample*> pointers;
  pointers.reserve(batch.size());
  for (const LabeledExample& example : batch) pointers.push_back(&example);
  return bound_descent_direction(pointers, box, pm, cfg);
}

ParamBox train(std::span<const LabeledExample> data, std::span<const std::size_t> widths,
               const TrainConfig& cfg, const PerturbationModel& pm, const BoxObserver& observer) {
  cfg.validate(data.size(), pm);
  Mlp model = Mlp::he_uniform(widths, cfg.init_seed);
  ParamBox box = ParamBox::point(model);
  std::vector<double> lo = box.flat_lo();
  std::vector<double> hi = box.flat_hi();

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate(epoch);
    for (const auto& indices : epoch_batches(data.size(), cfg.batch_size, cfg.shuffle_seed, epoch)) {
      const std::vector<const LabeledExample*> batch = gather(data, indices);
      // Bounds use the box from before this step's nominal update.
      const DescentBounds direction = bound_descent_direction(batch, box, pm, cfg);
      sgd_step(model, batch, lr, cfg.clip);

      const std::vector<double> theta = flatten(model.layers());
      for (std::size_t i = 0; i < lo.size(); ++i) {
        double new_lo = lo[i] - lr * direction.hi[i];
        double new_hi = hi[i] - lr * direction.lo[i];
        // Only rounding can order these wrongly or leave theta a few ulps
        // outside; widening keeps the box valid.
        if (new_lo > new_hi) std::swap(new_lo, new_hi);
        lo[i] = std::min(new_lo, theta[i]);
        hi[i] = std::max(new_hi, theta[i]);
      }
      box = box_from_flat(model, lo, hi);
      if (observer) observer(step, box);
      ++step;
    }
  }
  return box;
}

Mlp train_nominal(std::span<const LabeledExample> data, std::span<const std::size_t> widths,
                  const TrainConfig& cfg, const ModelObserver& observer) {
  cfg.validate(data.size(), PerturbationModel::none());
  Mlp model = Mlp::he_uniform(widths, cfg.init_seed);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate(epoch);
    for (const auto& indices : epoch_batches(data.size(), cfg.batch_size, cfg.shuffle_seed, epoch)) {
      sgd_step(model, gather(data, indices), lr, cfg.clip);
      if (observer) observer(step, model);
      ++step;
    }
  }
  return model;
}

}  // namespace agt
