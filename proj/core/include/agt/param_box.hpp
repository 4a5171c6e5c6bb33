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
#include <span>
#include <vector>

#include "agt/interval.hpp"
#include "agt/mlp.hpp"

namespace agt {

struct IntervalLayer {
  IntervalTensor weight;
  IntervalTensor bias;
};

/// Flat lo/hi vectors in the layout of agt::flatten().
std::vector<double> flatten_lo(std::span<const IntervalLayer> layers);
std::vector<double> flatten_hi(std::span<const IntervalLayer> layers);

/// Nominal parameters plus an elementwise box [lo, hi] around them.
///
/// Produced by abstract gradient training: every parameter vector that
/// ordinary training could reach under the configured dataset perturbation
/// lies inside the box.
class ParamBox {
 public:
  ParamBox() = default;
  /// Throws DimensionError if the bounds do not match the nominal shapes.
  ParamBox(Mlp nominal, std::vector<IntervalLayer> bounds);

  /// Zero-width box at a parameter point.
  static ParamBox point(const Mlp& model);

  const Mlp& nominal() const noexcept { return nominal_; }
  const std::vector<IntervalLayer>& bounds() const noexcept { return bounds_; }
  std::size_t depth() const noexcept { return bounds_.size(); }

  /// Largest amount by which any parameter of model falls outside the box
  /// (0 when inside). Throws DimensionError on shape mismatch.
  double max_excess(const Mlp& model) const;
  bool contains(const Mlp& model, double tolerance = 0.0) const;
  /// Elementwise lo <= nominal <= hi within tolerance.
  bool nominal_inside(double tolerance = 0.0) const;
  double max_width() const;

  std::vector<double> flat_lo() const;
  std::vector<double> flat_hi() const;

  /// Box scaled about the nominal point by factor (0.5 halves each side).
  ParamBox shrunk(double factor) const;

 private:
  Mlp nominal_;
  std::vector<IntervalLayer> bounds_;
};

}  // namespace agt
