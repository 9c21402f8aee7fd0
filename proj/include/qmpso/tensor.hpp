// Copyright 2026 The qmpso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense complex tensors and the handful of linear-algebra kernels the rest of
 * the library is written against: pairwise contraction, truncated SVD and
 * exponentials of small Hermitian matrices.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qmpso {

using cplx = std::complex<double>;

/// Row-major dynamic complex matrix. Row-major so that a tensor's flat
/// buffer can be viewed as a matrix without copying.
using Matrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Two-qubit operator; basis index is 2*s_left + s_right.
using Gate = Eigen::Matrix4cd;
/// Single-qubit operator.
using Gate1 = Eigen::Matrix2cd;

/// Singular values below this are treated as exact zeros.
inline constexpr double kDefaultCutoff = 1e-14;

class ComplexTensor {
 public:
  using Shape = std::vector<std::size_t>;

  /// Rank-0 tensor holding a single zero.
  ComplexTensor();
  /// Zero-filled tensor.
  explicit ComplexTensor(Shape shape);
  ComplexTensor(Shape shape, std::vector<cplx> data);

  static ComplexTensor from_matrix(const Matrix &m);
  static ComplexTensor identity(std::size_t n);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  cplx &operator[](std::size_t flat) { return data_[flat]; }
  const cplx &operator[](std::size_t flat) const { return data_[flat]; }

  cplx &at(std::initializer_list<std::size_t> index);
  const cplx &at(std::initializer_list<std::size_t> index) const;

  /// Zero-copy matrix view of the flat buffer; rows*cols must equal size().
  Eigen::Map<Matrix> as_matrix(std::size_t rows, std::size_t cols);
  Eigen::Map<const Matrix> as_matrix(std::size_t rows, std::size_t cols) const;

  /// Copy of a rank-2 tensor as a matrix.
  Matrix to_matrix() const;

  ComplexTensor reshaped(Shape shape) const;
  /// Result axis i is input axis perm[i].
  ComplexTensor permuted(std::span<const std::size_t> perm) const;
  ComplexTensor conj() const;

  ComplexTensor &operator*=(cplx s);
  ComplexTensor &operator+=(const ComplexTensor &o);
  ComplexTensor &operator-=(const ComplexTensor &o);
  friend ComplexTensor operator*(cplx s, ComplexTensor t) { return t *= s; }
  friend ComplexTensor operator*(ComplexTensor t, cplx s) { return t *= s; }
  friend ComplexTensor operator+(ComplexTensor a, const ComplexTensor &b) {
    return a += b;
  }
  friend ComplexTensor operator-(ComplexTensor a, const ComplexTensor &b) {
    return a -= b;
  }

  double norm() const;
  bool all_finite() const;

 private:
  std::size_t flat_index(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<cplx> data_;
};

/// Largest elementwise |a - b|; shapes must match.
double max_abs_diff(const ComplexTensor &a, const ComplexTensor &b);

/// Sums over the paired axes (axis of a, axis of b). Free axes of `a` come
/// first in the result, followed by the free axes of `b`, each in their
/// original order.
ComplexTensor contract(const ComplexTensor &a, const ComplexTensor &b,
                       std::span<const std::pair<std::size_t, std::size_t>> axes);
ComplexTensor contract(
    const ComplexTensor &a, const ComplexTensor &b,
    std::initializer_list<std::pair<std::size_t, std::size_t>> axes);

struct SvdResult {
  Matrix left_vectors;                 // m x r
  std::vector<double> singular_values; // descending
  Matrix right_vectors_conj_transposed; // r x n
  double truncation_weight = 0.0;      // sum of discarded s^2

  std::size_t rank() const { return singular_values.size(); }
  Matrix reconstruct() const;
};

/// Keeps at most `max_rank` singular triplets and drops any whose singular
/// value is below `cutoff`. Equal singular values keep the order the
/// decomposition produced them in.
SvdResult svd_truncated(const Matrix &m, std::size_t max_rank,
                        double cutoff = kDefaultCutoff);
SvdResult svd_truncated(const ComplexTensor &m, std::size_t max_rank,
                        double cutoff = kDefaultCutoff);

/// exp(scale * h) for Hermitian h, computed from the eigendecomposition of h.
Matrix herm_exp(const Matrix &h, cplx scale);
ComplexTensor herm_exp(const ComplexTensor &h, cplx scale);
Gate herm_exp(const Gate &h, cplx scale);

bool is_hermitian(const Matrix &m, double tol = 1e-10);
bool is_unitary(const Matrix &m, double tol = 1e-12);

/// Kronecker product of two single-qubit operators, first argument on the
/// left (more significant) qubit.
Gate kron(const Gate1 &a, const Gate1 &b);

namespace pauli {
Gate1 identity();
Gate1 x();
Gate1 y();
Gate1 z();
}  // namespace pauli

}  // namespace qmpso
