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
#include "agt/param_box.hpp"

#include <algorithm>
#include <string>

#include "agt/errors.hpp"

namespace agt {
namespace {

double excess(const IntervalTensor& box, const Tensor& value) {
  double worst = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    worst = std::max({worst, box.lo()[i] - value[i], value[i] - box.hi()[i]});
  }
  return worst;
}

IntervalTensor shrink_about(const IntervalTensor& box, const Tensor& centre, double factor) {
  Tensor lo = box.lo();
  Tensor hi = box.hi();
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] = centre[i] - factor * (centre[i] - lo[i]);
    hi[i] = centre[i] + factor * (hi[i] - centre[i]);
    lo[i] = std::min(lo[i], centre[i]);
    hi[i] = std::max(hi[i], centre[i]);
  }
  return IntervalTensor(std::move(lo), std::move(hi));
}

}  // namespace

std::vector<double> flatten_lo(std::span<const IntervalLayer> layers) {
  std::vector<double> flat;
  for (const IntervalLayer& layer : layers) {
    flat.insert(flat.end(), layer.weight.lo().values().begin(), layer.weight.lo().values().end());
    flat.insert(flat.end(), layer.bias.lo().values().begin(), layer.bias.lo().values().end());
  }
  return flat;
}

std::vector<double> flatten_hi(std::span<const IntervalLayer> layers) {
  std::vector<double> flat;
  for (const IntervalLayer& layer : layers) {
    flat.insert(flat.end(), layer.weight.hi().values().begin(), layer.weight.hi().values().end());
    flat.insert(flat.end(), layer.bias.hi().values().begin(), layer.bias.hi().values().end());
  }
  return flat;
}

ParamBox::ParamBox(Mlp nominal, std::vector<IntervalLayer> bounds)
    : nominal_(std::move(nominal)), bounds_(std::move(bounds)) {
  const auto& layers = nominal_.layers();
  if (layers.size() != bounds_.size()) {
    throw DimensionError("ParamBox: " + std::to_string(bounds_.size()) + " bound layers for a " +
                         std::to_string(layers.size()) + "-layer model");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (!bounds_[k].weight.lo().same_shape(layers[k].weight) ||
        !bounds_[k].bias.lo().same_shape(layers[k].bias)) {
      throw DimensionError("ParamBox: bound shapes differ from layer " + std::to_string(k));
    }
  }
}

ParamBox ParamBox::point(const Mlp& model) {
  std::vector<IntervalLayer> bounds;
  bounds.reserve(model.depth());
  for (const DenseLayer& layer : model.layers()) {
    bounds.push_back({IntervalTensor::point(layer.weight), IntervalTensor::point(layer.bias)});
  }
  return ParamBox(model, std::move(bounds));
}

double ParamBox::max_excess(const Mlp& model) const {
  const auto& layers = model.layers();
  if (layers.size() != bounds_.size()) throw DimensionError("ParamBox::max_excess: depth mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (!layers[k].weight.same_shape(bounds_[k].weight.lo()) ||
        !layers[k].bias.same_shape(bounds_[k].bias.lo())) {
      throw DimensionError("ParamBox::max_excess: shape mismatch at layer " + std::to_string(k));
    }
    worst = std::max(worst, excess(bounds_[k].weight, layers[k].weight));
    worst = std::max(worst, excess(bounds_[k].bias, layers[k].bias));
  }
  return worst;
}

bool ParamBox::contains(const Mlp& model, double tolerance) const {
  return max_excess(model) <= tolerance;
}

bool ParamBox::nominal_inside(double tolerance) const { return contains(nominal_, tolerance); }

double ParamBox::max_width() const {
  double widest = 0.0;
  for (const IntervalLayer& layer : bounds_) {
    for (const IntervalTensor* t : {&layer.weight, &layer.bias}) {
      for (std::size_t i = 0; i < t->size(); ++i) widest = std::max(widest, t->hi()[i] - t->lo()[i]);
    }
  }
  return widest;
}

std::vector<double> ParamBox::flat_lo() const { return flatten_lo(bounds_); }
std::vector<double> ParamBox::flat_hi() const { return flatten_hi(bounds_); }

ParamBox ParamBox::shrunk(double factor) const {
  std::vector<IntervalLayer> bounds;
  bounds.reserve(bounds_.size());
  for (std::size_t k = 0; k < bounds_.size(); ++k) {
    const DenseLayer& centre = nominal_.layers()[k];
    bounds.push_back({shrink_about(bounds_[k].weight, centre.weight, factor),
                      shrink_about(bounds_[k].bias, centre.bias, factor)});
  }
  return ParamBox(nominal_, std::move(bounds));
}

}  // namespace agt
