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
#include <random>

namespace agt {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable random source with a fully specified output sequence.
///
/// The engine is std::mt19937_64, whose output is fixed by the standard.
/// Every derived distribution is computed here instead of through the
/// <random> distribution classes, which are implementation-defined:
///   uniform()      (next() >> 11) * 2^-53, in [0, 1)
///   uniform_open() (( next() >> 11) + 0.5) * 2^-53, in (0, 1)
///   index(n)       rejection sampling on the top bits
///   normal()       Box-Muller on two uniform_open() draws (one value kept)
///   laplace(s)     inverse CDF: -s * sgn(u) * ln(1 - 2|u|), u = uniform_open() - 1/2
///   cauchy()       inverse CDF: tan(pi * (uniform_open() - 1/2))
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform_open();
  std::size_t index(std::size_t n);
  double normal();
  double laplace(double scale);
  double cauchy();

 private:
  std::mt19937_64 engine_;
};

}  // namespace agt
