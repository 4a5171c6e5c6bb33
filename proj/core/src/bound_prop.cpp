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
#include "agt/bound_prop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agt/errors.hpp"

namespace agt {
namespace {

// Applies a non-decreasing scalar map to both endpoints.
template <typename F>
IntervalTensor map_endpoints(const IntervalTensor& a, F fn) {
  Tensor lo = a.lo();
  Tensor hi = a.hi();
  for (double& v : lo.values()) v = fn(v);
  for (double& v : hi.values()) v = fn(v);
  return IntervalTensor(std::move(lo), std::move(hi));
}

// Heaviside factor for a pre-activation interval.
IntervalTensor relu_derivative(const IntervalTensor& pre) { return map_endpoints(pre, heaviside); }

// -log(1 + sum_j exp(terms[j])), computed stably.
double neg_log_one_plus_sum_exp(std::span<const double> terms) {
  double top = 0.0;
  for (double t : terms) top = std::max(top, t);
  double total = std::exp(-top);
  for (double t : terms) total += std::exp(t - top);
  return -(top + std::log(total));
}

}  // namespace

IntervalForward interval_forward(const ParamBox& box, std::span<const double> x) {
  const Mlp& model = box.nominal();
  if (x.size() != model.input_dim()) {
    throw DimensionError("interval_forward: input has " + std::to_string(x.size()) +
                         " features, model expects " + std::to_string(model.input_dim()));
  }
  const auto& bounds = box.bounds();
  IntervalForward cache;
  cache.inputs.reserve(bounds.size());
  cache.pre.reserve(bounds.size());
  IntervalTensor z = IntervalTensor::point(Tensor::column(x));
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    IntervalTensor pre = iadd(imatmul(bounds[k].weight, z), bounds[k].bias);
    cache.inputs.push_back(std::move(z));
    if (k + 1 < bounds.size()) z = map_endpoints(pre, relu);
    cache.pre.push_back(std::move(pre));
  }
  return cache;
}

IntervalTensor softmax_bounds(const IntervalTensor& logits) {
  const std::size_t n = logits.size();
  const Tensor& z_lo = logits.lo();
  const Tensor& z_hi = logits.hi();
  Tensor p_lo(logits.rows(), logits.cols());
  Tensor p_hi(logits.rows(), logits.cols());
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    terms.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) terms.push_back(z_hi[j] - z_lo[i]);
    p_lo[i] = std::exp(neg_log_one_plus_sum_exp(terms));
    terms.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) terms.push_back(z_lo[j] - z_hi[i]);
    p_hi[i] = std::exp(neg_log_one_plus_sum_exp(terms));
  }
  return IntervalTensor(std::move(p_lo), std::move(p_hi));
}

GradBounds interval_backward(const ParamBox& box, const IntervalForward& cache, int y) {
  const auto& bounds = box.bounds();
  if (cache.pre.size() != bounds.size() || cache.inputs.size() != bounds.size()) {
    throw UsageError("interval_backward: cache was produced by a box of different depth");
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (cache.pre[k].rows() != bounds[k].weight.rows() ||
        cache.inputs[k].rows() != bounds[k].weight.cols()) {
      throw UsageError("interval_backward: cache shapes do not match layer " + std::to_string(k));
    }
  }
  const IntervalTensor probs = softmax_bounds(cache.logits());
  if (y < 0 || static_cast<std::size_t>(y) >= probs.size()) {
    throw std::invalid_argument("interval_backward: label " + std::to_string(y) + " out of range");
  }
  Tensor d_lo = probs.lo();
  Tensor d_hi = probs.hi();
  d_lo[static_cast<std::size_t>(y)] -= 1.0;
  d_hi[static_cast<std::size_t>(y)] -= 1.0;
  IntervalTensor delta(std::move(d_lo), std::move(d_hi));

  GradBounds grads(bounds.size());
  for (std::size_t k = bounds.size(); k-- > 0;) {
    grads[k].weight = iouter(delta, cache.inputs[k]);
    grads[k].bias = delta;
    if (k == 0) break;
    IntervalTensor upstream = imatmul_tn(bounds[k].weight, delta);
    delta = ihadamard(relu_derivative(cache.pre[k - 1]), upstream);
  }
  return grads;
}

GradBounds clip_bounds(const GradBounds& grads, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("clip_bounds: gamma must be positive");
  GradBounds clipped;
  clipped.reserve(grads.size());
  for (const IntervalLayer& layer : grads) {
    clipped.push_back({iclamp(layer.weight, -gamma, gamma), iclamp(layer.bias, -gamma, gamma)});
  }
  return clipped;
}

}  // namespace agt
