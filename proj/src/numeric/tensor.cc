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

#include "fedsim/numeric/tensor.h"

#include <algorithm>
#include <cmath>

#include "fedsim/common/error.h"

namespace fedsim {

Tensor2::Tensor2(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    Fail(ErrorCode::kInvalidArgument,
         "tensor dimensions must be positive, got (" + std::to_string(rows) +
             " x " + std::to_string(cols) + ")");
  }
  values_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Tensor2::Tensor2(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(values.begin(), values.end()) {
  if (rows <= 0 || cols <= 0) {
    Fail(ErrorCode::kInvalidArgument,
         "tensor dimensions must be positive, got (" + std::to_string(rows) +
             " x " + std::to_string(cols) + ")");
  }
  if (values_.size() != static_cast<std::size_t>(rows) * cols) {
    Fail(ErrorCode::kInvalidArgument,
         "tensor " + ShapeString() + " given " +
             std::to_string(values_.size()) + " values");
  }
}

Tensor2 Tensor2::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = n_rows == 0 ? 0 : static_cast<int>(rows.begin()->size());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_rows) * n_cols);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n_cols) {
      Fail(ErrorCode::kInvalidArgument, "ragged rows in tensor literal");
    }
    values.insert(values.end(), r.begin(), r.end());
  }
  return Tensor2(n_rows, n_cols, std::move(values));
}

void Tensor2::Fill(double value) {
  std::fill(values_.begin(), values_.end(), value);
}

bool Tensor2::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor2::ShapeString() const {
  return "(" + std::to_string(rows_) + " x " + std::to_string(cols_) + ")";
}

}  // namespace fedsim
