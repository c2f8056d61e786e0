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

#ifndef FEDSIM_NUMERIC_TENSOR_H_
#define FEDSIM_NUMERIC_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace fedsim {

// Cache-line aligned storage. Vectorized reductions split work by address
// alignment, so a fixed alignment keeps results identical no matter where a
// buffer was allocated.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

// Dense row-major matrix of doubles. Vectors are 1 x n tensors.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(int rows, int cols, double fill = 0.0);
  Tensor2(int rows, int cols, std::vector<double> values);

  // Builds a tensor from nested row literals; all rows must have equal length.
  static Tensor2 FromRows(
      std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(int r, int c) {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(int r) {
    return {values_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  bool SameShape(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  void Fill(double value);
  bool AllFinite() const;

  // "(rows x cols)", used in error messages.
  std::string ShapeString() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  AlignedVector values_;
};

}  // namespace fedsim

#endif  // FEDSIM_NUMERIC_TENSOR_H_
