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

#include <span>
#include <vector>

#include "agt/interval.hpp"
#include "agt/param_box.hpp"

namespace agt {

/// Interval activations recorded by interval_forward().
struct IntervalForward {
  std::vector<IntervalTensor> inputs;  // enclosure of z^(k-1)
  std::vector<IntervalTensor> pre;     // enclosure of zhat^(k)

  const IntervalTensor& logits() const { return pre.back(); }
};

/// Per-layer enclosures of the loss gradient, shaped like the model.
using GradBounds = std::vector<IntervalLayer>;

/// Encloses forward(theta, x) for every theta in the box.
IntervalForward interval_forward(const ParamBox& box, std::span<const double> x);

/// Bounds on softmax(z) for every z in the logit box:
///   p_lo[i] = 1 / (1 + sum_{j != i} exp(z_hi[j] - z_lo[i]))
///   p_hi[i] = 1 / (1 + sum_{j != i} exp(z_lo[j] - z_hi[i]))
/// The self term is exactly 1 for every member of the box, so it is not
/// widened. Evaluated as exp(-logsumexp) to avoid overflow.
IntervalTensor softmax_bounds(const IntervalTensor& logits);

/// Back-propagates [p_lo - y, p_hi - y] through the interval network. The
/// ReLU derivative of a pre-activation interval is [H(lo), H(hi)] with H(0) = 0.
/// Throws UsageError if the cache does not match the box.
GradBounds interval_backward(const ParamBox& box, const IntervalForward& cache, int y);

/// Clamps both bounds of every entry into [-gamma, gamma]; gamma must be > 0.
GradBounds clip_bounds(const GradBounds& grads, double gamma);

}  // namespace agt
