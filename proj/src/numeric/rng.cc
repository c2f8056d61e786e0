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

#include "fedsim/numeric/rng.h"

#include <cmath>
#include <numbers>

#include "fedsim/common/error.h"

namespace fedsim {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kLabelSalt = 0xD6E8FEB86659FD93ULL;
constexpr std::uint64_t kIndexSalt = 0xA0761D6478BD642FULL;

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), key_(Mix64(seed)) {}

std::uint64_t SeededRng::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGolden);
}

double SeededRng::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::UniformInt(std::uint64_t bound) {
  if (bound == 0) Fail(ErrorCode::kInvalidArgument, "UniformInt bound is 0");
  // Lemire's multiply-shift with rejection of the biased low region.
  unsigned __int128 product =
      static_cast<unsigned __int128>(NextU64()) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(NextU64()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double SeededRng::NextGaussian() {
  if (spare_gaussian_) {
    const double v = *spare_gaussian_;
    spare_gaussian_.reset();
    return v;
  }
  const double u1 = 1.0 - NextUniform();  // (0, 1]
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_gaussian_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

SeededRng SeededRng::Derive(std::string_view label) const {
  return SeededRng(seed_, Mix64(key_ ^ Mix64(Fnv1a(label) + kLabelSalt)));
}

SeededRng SeededRng::Derive(std::uint64_t index) const {
  return SeededRng(seed_, Mix64(key_ ^ Mix64(index * kGolden + kIndexSalt)));
}

std::vector<double> Gaussian(SeededRng& rng, std::size_t n, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    Fail(ErrorCode::kInvalidArgument, "gaussian sigma must be finite and >= 0");
  }
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  for (double& v : out) v = sigma * rng.NextGaussian();
  return out;
}

}  // namespace fedsim
