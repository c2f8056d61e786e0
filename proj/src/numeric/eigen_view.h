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

#ifndef FEDSIM_SRC_NUMERIC_EIGEN_VIEW_H_
#define FEDSIM_SRC_NUMERIC_EIGEN_VIEW_H_

#include <Eigen/Dense>

#include "fedsim/numeric/tensor.h"

namespace fedsim::internal {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;

inline MatrixView View(Tensor2& t) {
  return MatrixView(t.data(), t.rows(), t.cols());
}
inline ConstMatrixView View(const Tensor2& t) {
  return ConstMatrixView(t.data(), t.rows(), t.cols());
}

}  // namespace fedsim::internal

#endif  // FEDSIM_SRC_NUMERIC_EIGEN_VIEW_H_
