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

#include "fedsim/numeric/param_set.h"

#include <cmath>

#include "fedsim/common/error.h"

namespace fedsim {

void ParamSet::Add(std::string name, Tensor2 tensor) {
  if (Contains(name)) {
    Fail(ErrorCode::kInvalidArgument, "duplicate parameter name '" + name + "'");
  }
  entries_.push_back({std::move(name), std::move(tensor)});
}

std::optional<std::size_t> ParamSet::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

const Tensor2& ParamSet::Get(std::string_view name) const {
  auto index = IndexOf(name);
  if (!index) {
    Fail(ErrorCode::kInvalidArgument,
         "parameter '" + std::string(name) + "' not found");
  }
  return entries_[*index].tensor;
}

Tensor2& ParamSet::GetMutable(std::string_view name) {
  auto index = IndexOf(name);
  if (!index) {
    Fail(ErrorCode::kInvalidArgument,
         "parameter '" + std::string(name) + "' not found");
  }
  return entries_[*index].tensor;
}

std::vector<std::string> ParamSet::Names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& e : entries_) names.push_back(e.name);
  return names;
}

std::size_t ParamSet::ScalarCount() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

ParamSet ParamSet::ZerosLike() const {
  ParamSet out;
  for (const auto& e : entries_) {
    out.Add(e.name, Tensor2(e.tensor.rows(), e.tensor.cols()));
  }
  return out;
}

bool ShapeCompatible(const ParamSet& a, const ParamSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !a[i].tensor.SameShape(b[i].tensor)) {
      return false;
    }
  }
  return true;
}

void RequireShapeCompatible(const ParamSet& a, const ParamSet& b,
                            std::string_view context) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kShapeMismatch,
         std::string(context) + ": parameter sets have " +
             std::to_string(a.size()) + " and " + std::to_string(b.size()) +
             " entries");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) {
      Fail(ErrorCode::kShapeMismatch,
           std::string(context) + ": entry " + std::to_string(i) + " is '" +
               a[i].name + "' vs '" + b[i].name + "'");
    }
    if (!a[i].tensor.SameShape(b[i].tensor)) {
      Fail(ErrorCode::kShapeMismatch,
           std::string(context) + ": '" + a[i].name + "' has shape " +
               a[i].tensor.ShapeString() + " vs " +
               b[i].tensor.ShapeString());
    }
  }
}

double GlobalNorm(const ParamSet& params) {
  double sum = 0.0;
  for (const auto& e : params) {
    for (double v : e.tensor.values()) sum += v * v;
  }
  return std::sqrt(sum);
}

void Scale(ParamSet& params, double factor) {
  for (auto& e : params) {
    for (double& v : e.tensor.values()) v *= factor;
  }
}

void AddScaled(ParamSet& dst, const ParamSet& src, double factor) {
  RequireShapeCompatible(dst, src, "AddScaled");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i].tensor.values();
    auto s = src[i].tensor.values();
    for (std::size_t j = 0; j < d.size(); ++j) d[j] += factor * s[j];
  }
}

bool AllFinite(const ParamSet& params) {
  for (const auto& e : params) {
    if (!e.tensor.AllFinite()) return false;
  }
  return true;
}

}  // namespace fedsim
