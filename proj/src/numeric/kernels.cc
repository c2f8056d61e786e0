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

#include "fedsim/numeric/kernels.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsim/common/error.h"
#include "numeric/eigen_view.h"

namespace fedsim {

NormOrder ParseNormOrder(std::string_view text) {
  if (text == "1") return NormOrder::kL1;
  if (text == "2") return NormOrder::kL2;
  Fail(ErrorCode::kConfig,
       "norm order must be 1 or 2, got '" + std::string(text) + "'");
}

Tensor2 MatMul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows()) {
    Fail(ErrorCode::kShapeMismatch, "MatMul: cannot multiply " +
                                        a.ShapeString() + " by " +
                                        b.ShapeString());
  }
  Tensor2 out(a.rows(), b.cols());
  internal::View(out).noalias() = internal::View(a) * internal::View(b);
  return out;
}

std::vector<double> Softmax(std::span<const double> logits) {
  if (logits.empty()) Fail(ErrorCode::kInvalidArgument, "Softmax: empty input");
  if (!std::all_of(logits.begin(), logits.end(),
                   [](double v) { return std::isfinite(v); })) {
    Fail(ErrorCode::kInvalidArgument, "Softmax: non-finite input");
  }
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double PNormDiff(const Tensor2& a, const Tensor2& b, NormOrder p) {
  if (!a.SameShape(b)) {
    Fail(ErrorCode::kShapeMismatch, "PNormDiff: shapes " + a.ShapeString() +
                                        " and " + b.ShapeString() + " differ");
  }
  auto av = a.values();
  auto bv = b.values();
  double sum = 0.0;
  if (p == NormOrder::kL1) {
    for (std::size_t i = 0; i < av.size(); ++i) sum += std::abs(av[i] - bv[i]);
    return sum;
  }
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace fedsim
