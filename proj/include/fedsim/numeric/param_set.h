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

#ifndef FEDSIM_NUMERIC_PARAM_SET_H_
#define FEDSIM_NUMERIC_PARAM_SET_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/numeric/tensor.h"

namespace fedsim {

// Ordered collection of uniquely named tensors. This is the unit a server
// broadcasts and a client uploads.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor2 tensor;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  // Appends an entry. Duplicate names are rejected.
  void Add(std::string name, Tensor2 tensor);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  Entry& operator[](std::size_t i) { return entries_[i]; }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  bool Contains(std::string_view name) const {
    return IndexOf(name).has_value();
  }
  // Throws kInvalidArgument when `name` is absent.
  const Tensor2& Get(std::string_view name) const;
  Tensor2& GetMutable(std::string_view name);

  std::vector<std::string> Names() const;
  std::size_t ScalarCount() const;

  // Same names and shapes, every value zero.
  ParamSet ZerosLike() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<Entry> entries_;
};

// True iff both sets list identical names in identical order with identical
// tensor shapes.
bool ShapeCompatible(const ParamSet& a, const ParamSet& b);

// Throws kShapeMismatch naming the first offending entry.
void RequireShapeCompatible(const ParamSet& a, const ParamSet& b,
                            std::string_view context);

// sqrt of the sum of squares over every scalar in the set.
double GlobalNorm(const ParamSet& params);

// params *= factor, in place.
void Scale(ParamSet& params, double factor);

// dst += factor * src, in place. Shapes must be compatible.
void AddScaled(ParamSet& dst, const ParamSet& src, double factor);

bool AllFinite(const ParamSet& params);

}  // namespace fedsim

#endif  // FEDSIM_NUMERIC_PARAM_SET_H_
