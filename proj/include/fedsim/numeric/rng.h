// Copyright 2026 The Fedsim Authors
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

#ifndef FEDSIM_NUMERIC_RNG_H_
#define FEDSIM_NUMERIC_RNG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fedsim {

// Counter-based random source. Draw i of a stream is a pure function of
// (key, i), so a stream's output depends only on its seed and on how many
// draws it has made. Child streams are keyed from the parent key and a label,
// never from the parent's position.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);
  // Standard normal via Box-Muller; consumes draws in pairs.
  double NextGaussian();

  SeededRng Derive(std::string_view label) const;
  SeededRng Derive(std::uint64_t index) const;

 private:
  SeededRng(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_gaussian_;
};

// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t Mix64(std::uint64_t x);

// n i.i.d. draws from N(0, sigma^2). sigma == 0 yields exact zeros and
// consumes no draws.
std::vector<double> Gaussian(SeededRng& rng, std::size_t n, double sigma);

}  // namespace fedsim

#endif  // FEDSIM_NUMERIC_RNG_H_
