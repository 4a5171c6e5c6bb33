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
#include "agt/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agt/errors.hpp"
#include "agt/random.hpp"

namespace agt {

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    if (layer.bias.rows() != layer.weight.rows() || layer.bias.cols() != 1) {
      throw DimensionError("Mlp: layer " + std::to_string(k) + " bias does not match weight rows");
    }
    if (k > 0 && layer.weight.cols() != layers_[k - 1].weight.rows()) {
      throw DimensionError("Mlp: layer " + std::to_string(k) + " input width " +
                           std::to_string(layer.weight.cols()) + " != previous output width " +
                           std::to_string(layers_[k - 1].weight.rows()));
    }
  }
}

Mlp Mlp::he_uniform(std::span<const std::size_t> widths, std::uint64_t seed) {
  if (widths.size() < 2) throw ConfigError("Mlp::he_uniform: need at least input and output widths");
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t k = 1; k < widths.size(); ++k) {
    const std::size_t fan_in = widths[k - 1];
    const double limit = fan_in == 0 ? 0.0 : std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer{Tensor(widths[k], fan_in), Tensor(widths[k], 1)};
    for (double& w : layer.weight.values()) w = limit * (2.0 * rng.uniform() - 1.0);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::size_t Mlp::input_dim() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
std::size_t Mlp::output_dim() const { return layers_.empty() ? 0 : layers_.back().weight.rows(); }

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> w;
  if (layers_.empty()) return w;
  w.push_back(input_dim());
  for (const DenseLayer& layer : layers_) w.push_back(layer.weight.rows());
  return w;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }
double heaviside(double v) { return v > 0.0 ? 1.0 : 0.0; }

ForwardCache forward(const Mlp& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) {
    throw DimensionError("forward: input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.input_dim()));
  }
  ForwardCache cache;
  const auto& layers = model.layers();
  cache.inputs.reserve(layers.size());
  cache.pre.reserve(layers.size());
  Tensor z = Tensor::column(x);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Tensor pre = add(matmul(layers[k].weight, z), layers[k].bias);
    cache.inputs.push_back(std::move(z));
    if (k + 1 < layers.size()) {
      z = pre;
      for (double& v : z.values()) v = relu(v);
    }
    cache.pre.push_back(std::move(pre));
  }
  return cache;
}

Tensor predict_logits(const Mlp& model, std::span<const double> x) {
  return forward(model, x).pre.back();
}

int argmax(const Tensor& logits) {
  const auto values = logits.values();
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

LossGrad ce_loss_grad(const Tensor& logits, int y) {
  const std::size_t n = logits.size();
  if (y < 0 || static_cast<std::size_t>(y) >= n) {
    throw std::invalid_argument("ce_loss_grad: label " + std::to_string(y) + " out of range");
  }
  const auto values = logits.values();
  const double top = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += std::exp(v - top);
  const double log_total = std::log(total);

  LossGrad out;
  out.dlogits = Tensor(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < n; ++i) out.dlogits[i] = std::exp(values[i] - top - log_total);
  out.loss = -(values[static_cast<std::size_t>(y)] - top - log_total);
  out.dlogits[static_cast<std::size_t>(y)] -= 1.0;
  return out;
}

Gradients backward(const Mlp& model, const ForwardCache& cache, const Tensor& dlogits) {
  const auto& layers = model.layers();
  if (cache.pre.size() != layers.size() || cache.inputs.size() != layers.size()) {
    throw UsageError("backward: cache was produced by a model of different depth");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (cache.pre[k].rows() != layers[k].weight.rows() ||
        cache.inputs[k].rows() != layers[k].weight.cols()) {
      throw UsageError("backward: cache shapes do not match layer " + std::to_string(k));
    }
  }
  if (!dlogits.same_shape(cache.pre.back())) {
    throw DimensionError("backward: dlogits shape does not match the logits");
  }

  Gradients grads(layers.size());
  Tensor delta = dlogits;  // dL/dzhat^(k)
  for (std::size_t k = layers.size(); k-- > 0;) {
    grads[k].weight = matmul(delta, transpose(cache.inputs[k]));
    grads[k].bias = delta;
    if (k == 0) break;
    Tensor upstream = matmul(transpose(layers[k].weight), delta);
    const Tensor& pre = cache.pre[k - 1];
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] *= heaviside(pre[i]);
    delta = std::move(upstream);
  }
  return grads;
}

Gradients zeros_like(const Mlp& model) {
  Gradients grads;
  grads.reserve(model.depth());
  for (const DenseLayer& layer : model.layers()) {
    grads.push_back({Tensor(layer.weight.rows(), layer.weight.cols()), Tensor(layer.bias.rows(), 1)});
  }
  return grads;
}

void clip_in_place(Gradients& grads, double gamma) {
  for (DenseLayer& g : grads) {
    for (double& v : g.weight.values()) v = std::clamp(v, -gamma, gamma);
    for (double& v : g.bias.values()) v = std::clamp(v, -gamma, gamma);
  }
}

std::vector<double> flatten(std::span<const DenseLayer> layers) {
  std::vector<double> flat;
  for (const DenseLayer& layer : layers) {
    flat.insert(flat.end(), layer.weight.values().begin(), layer.weight.values().end());
    flat.insert(flat.end(), layer.bias.values().begin(), layer.bias.values().end());
  }
  return flat;
}

void unflatten_into(std::span<const double> flat, std::span<DenseLayer> layers) {
  std::size_t offset = 0;
  for (DenseLayer& layer : layers) {
    for (double& v : layer.weight.values()) {
      if (offset >= flat.size()) throw DimensionError("unflatten_into: flat vector too short");
      v = flat[offset++];
    }
    for (double& v : layer.bias.values()) {
      if (offset >= flat.size()) throw DimensionError("unflatten_into: flat vector too short");
      v = flat[offset++];
    }
  }
  if (offset != flat.size()) throw DimensionError("unflatten_into: flat vector too long");
}

}  // namespace agt
