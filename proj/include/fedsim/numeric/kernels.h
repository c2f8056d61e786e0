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

#ifndef FEDSIM_NUMERIC_KERNELS_H_
#define FEDSIM_NUMERIC_KERNELS_H_

#include <span>
#include <string_view>
#include <vector>

#include "fedsim/numeric/tensor.h"

namespace fedsim {

// Entrywise norm order used for parameter distances.
enum class NormOrder { kL1 = 1, kL2 = 2 };

// Parses "1" / "2"; anything else is a kConfig error.
NormOrder ParseNormOrder(std::string_view text);

// Standard matrix product. Throws kShapeMismatch naming both shapes when
// a.cols() != b.rows().
Tensor2 MatMul(const Tensor2& a, const Tensor2& b);

// Numerically stable softmax (max-subtracted). Input must be non-empty and
// finite.
std::vector<double> Softmax(std::span<const double> logits);

// Entrywise p-norm of (a - b). p = 2 is the Frobenius norm.
double PNormDiff(const Tensor2& a, const Tensor2& b, NormOrder p);

}  // namespace fedsim

#endif  // FEDSIM_NUMERIC_KERNELS_H_
