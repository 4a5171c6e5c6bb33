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
#include <span>
#include <vector>

#include "agt/interval.hpp"

namespace agt {

using Vector = std::vector<double>;

struct LabeledExample {
  Vector x;
  int label = 0;

  bool operator==(const LabeledExample&) const = default;
};

/// One affine layer: weight is n_out x n_in, bias is n_out x 1.
struct DenseLayer {
  Tensor weight;
  Tensor bias;

  bool operator==(const DenseLayer&) const = default;
};

/// Per-layer parameter gradients, shaped like the model's layers.
using Gradients = std::vector<DenseLayer>;

/// Dense feed-forward classifier. ReLU on every hidden layer, identity on
/// the output layer, whose activations are the logits.
class Mlp {
 public:
  Mlp() = default;
  /// Throws DimensionError if consecutive layers do not chain.
  explicit Mlp(std::vector<DenseLayer> layers);

  /// widths = {n_0, n_1, ..., n_K}. Weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)),
  /// biases zero; draws come from agt::Rng(seed) in row-major layer order.
  static Mlp he_uniform(std::span<const std::size_t> widths, std::uint64_t seed);

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::vector<std::size_t> widths() const;
  std::size_t parameter_count() const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<DenseLayer> layers_;
};

/// Activations recorded by forward() for backward().
struct ForwardCache {
  std::vector<Tensor> inputs;  // z^(k-1), the input to layer k
  std::vector<Tensor> pre;     // zhat^(k)

  const Tensor& logits() const { return pre.back(); }
};

struct LossGrad {
  double loss = 0.0;
  Tensor dlogits;
};

double relu(double v);
/// Heaviside step with H(0) = 0; the ReLU derivative used everywhere.
double heaviside(double v);

ForwardCache forward(const Mlp& model, std::span<const double> x);
Tensor predict_logits(const Mlp& model, std::span<const double> x);
int argmax(const Tensor& logits);

/// Softmax cross-entropy against class y, stabilised by max subtraction.
LossGrad ce_loss_grad(const Tensor& logits, int y);

/// Exact parameter gradients; throws UsageError if the cache does not
/// match the model's layer shapes.
Gradients backward(const Mlp& model, const ForwardCache& cache, const Tensor& dlogits);

Gradients zeros_like(const Mlp& model);
void clip_in_place(Gradients& grads, double gamma);

/// Flat layout: for each layer, the weight (row-major) then the bias.
std::vector<double> flatten(std::span<const DenseLayer> layers);
void unflatten_into(std::span<const double> flat, std::span<DenseLayer> layers);

}  // namespace agt
