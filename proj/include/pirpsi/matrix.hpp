// Copyright 2026 The pirpsi Authors.
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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pirpsi/errors.hpp"
#include "pirpsi/field.hpp"

namespace pirpsi {

// Dense row-major matrix over a prime field.
template <typename Field>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Field> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
      throw ValidationError("matrix entry count " +
                            std::to_string(entries_.size()) +
                            " does not match shape " + std::to_string(rows_) +
                            "x" + std::to_string(cols_));
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Field::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Field& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const Field& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<const Field> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<const Field> entries() const { return entries_; }

  std::vector<Field> operator*(std::span<const Field> x) const {
    if (x.size() != cols_) {
      throw ValidationError("matrix-vector shape mismatch");
    }
    std::vector<Field> y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Field acc;
      const Field* a = entries_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) acc += a[c] * x[c];
      y[r] = acc;
    }
    return y;
  }

  // Submatrix keeping the listed rows and columns, in the given order.
  Matrix select(std::span<const std::size_t> row_ids,
                std::span<const std::size_t> col_ids) const {
    Matrix m(row_ids.size(), col_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
      for (std::size_t j = 0; j < col_ids.size(); ++j) {
        m(i, j) = (*this)(row_ids[i], col_ids[j]);
      }
    }
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Field> entries_;
};

using FpMatrix = Matrix<Fp>;

// Cauchy matrix with entry (i, j) = 1 / (x_i + y_j), x_i = i, y_j = rows + j.
// Every square submatrix is invertible.
template <typename Field = Fp>
Matrix<Field> cauchy_matrix(std::size_t rows, std::size_t cols) {
  constexpr std::uint64_t p = Field::kModulus;
  if (rows + cols > p) {
    throw CapacityError("Cauchy matrix " + std::to_string(rows) + "x" +
                        std::to_string(cols) +
                        " needs more distinct generators than the field has");
  }
  // Largest generator sum is x_{rows-1} + y_{cols-1}; it must not wrap to 0.
  if (rows != 0 && cols != 0 && 2 * rows + cols - 2 >= p) {
    throw CapacityError("Cauchy generator sums wrap to zero modulo p");
  }
  Matrix<Field> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = Field(i + rows + j).inverse();
    }
  }
  return m;
}

// Returns x with a * x = b. Gauss-Jordan elimination with row pivoting.
template <typename Field>
std::vector<Field> solve(Matrix<Field> a, std::vector<Field> b) {
  if (!a.is_square()) throw ValidationError("solve needs a square matrix");
  if (b.size() != a.rows()) throw ValidationError("solve: rhs length mismatch");
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) {
      throw SingularError("singular matrix at column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    const Field inv = a(col, col).inverse();
    for (std::size_t c = col; c < n; ++c) a(col, c) *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const Field f = a(r, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  return b;
}

// Determinant by elimination; zero for singular input.
template <typename Field>
Field determinant(Matrix<Field> a) {
  if (!a.is_square()) throw ValidationError("determinant needs a square matrix");
  const std::size_t n = a.rows();
  Field det = Field::one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) return Field::zero();
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    const Field inv = a(col, col).inverse();
    for (std::size_t r = col + 1; r < n; ++r) {
      const Field f = a(r, col) * inv;
      if (f.is_zero()) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

}  // namespace pirpsi
