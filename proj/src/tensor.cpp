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

#include "qmpso/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qmpso/errors.hpp"

namespace qmpso {

namespace {

std::size_t product(const ComplexTensor::Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void check_extents(const ComplexTensor::Shape &shape) {
  for (auto e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive");
  }
}

std::string shape_str(const ComplexTensor::Shape &shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

}  // namespace

ComplexTensor::ComplexTensor() : data_(1, cplx{0.0, 0.0}) {}

ComplexTensor::ComplexTensor(Shape shape)
    : shape_(std::move(shape)), data_(product(shape_), cplx{0.0, 0.0}) {
  check_extents(shape_);
}

ComplexTensor::ComplexTensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (product(shape_) != data_.size()) {
    throw DimensionError("shape " + shape_str(shape_) + " does not hold " +
                         std::to_string(data_.size()) + " amplitudes");
  }
  if (!all_finite()) throw NumericError("tensor contains non-finite amplitudes");
}

ComplexTensor ComplexTensor::from_matrix(const Matrix &m) {
  ComplexTensor t({static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols())});
  t.as_matrix(m.rows(), m.cols()) = m;
  return t;
}

ComplexTensor ComplexTensor::identity(std::size_t n) {
  ComplexTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

std::size_t ComplexTensor::flat_index(
    std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index rank does not match tensor rank");
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw DimensionError("index out of range");
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

cplx &ComplexTensor::at(std::initializer_list<std::size_t> index) {
  return data_[flat_index(index)];
}

const cplx &ComplexTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[flat_index(index)];
}

Eigen::Map<Matrix> ComplexTensor::as_matrix(std::size_t rows,
                                            std::size_t cols) {
  if (rows * cols != data_.size()) {
    throw DimensionError("matrix view " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " does not fit tensor " +
                         shape_str(shape_));
  }
  return {data_.data(), static_cast<Eigen::Index>(rows),
          static_cast<Eigen::Index>(cols)};
}

Eigen::Map<const Matrix> ComplexTensor::as_matrix(std::size_t rows,
                                                  std::size_t cols) const {
  if (rows * cols != data_.size()) {
    throw DimensionError("matrix view " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " does not fit tensor " +
                         shape_str(shape_));
  }
  return {data_.data(), static_cast<Eigen::Index>(rows),
          static_cast<Eigen::Index>(cols)};
}

Matrix ComplexTensor::to_matrix() const {
  if (rank() != 2) throw DimensionError("to_matrix needs a rank-2 tensor");
  return as_matrix(shape_[0], shape_[1]);
}

ComplexTensor ComplexTensor::reshaped(Shape shape) const {
  check_extents(shape);
  if (product(shape) != data_.size()) {
    throw DimensionError("cannot reshape " + shape_str(shape_) + " to " +
                         shape_str(shape));
  }
  ComplexTensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

ComplexTensor ComplexTensor::permuted(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw DimensionError("permutation rank mismatch");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) throw DimensionError("invalid axis permutation");
    seen[p] = true;
  }
  Shape out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = shape_[perm[i]];

  // Input strides, reordered into output-axis order.
  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t i = r; i-- > 1;) in_stride[i - 1] = in_stride[i] * shape_[i];
  std::vector<std::size_t> stride(r);
  for (std::size_t i = 0; i < r; ++i) stride[i] = in_stride[perm[i]];

  ComplexTensor out(out_shape);
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < data_.size(); ++flat) {
    out.data_[flat] = data_[src];
    for (std::size_t ax = r; ax-- > 0;) {
      ++idx[ax];
      src += stride[ax];
      if (idx[ax] < out_shape[ax]) break;
      src -= stride[ax] * out_shape[ax];
      idx[ax] = 0;
    }
  }
  return out;
}

ComplexTensor ComplexTensor::conj() const {
  ComplexTensor t = *this;
  for (auto &v : t.data_) v = std::conj(v);
  return t;
}

ComplexTensor &ComplexTensor::operator*=(cplx s) {
  for (auto &v : data_) v *= s;
  return *this;
}

ComplexTensor &ComplexTensor::operator+=(const ComplexTensor &o) {
  if (o.shape_ != shape_) throw DimensionError("shape mismatch in addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexTensor &ComplexTensor::operator-=(const ComplexTensor &o) {
  if (o.shape_ != shape_) throw DimensionError("shape mismatch in subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

double ComplexTensor::norm() const {
  double s = 0.0;
  for (const auto &v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx &v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double max_abs_diff(const ComplexTensor &a, const ComplexTensor &b) {
  if (a.shape() != b.shape()) throw DimensionError("shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexTensor contract(const ComplexTensor &a, const ComplexTensor &b,
                       std::span<const std::pair<std::size_t, std::size_t>> axes) {
  std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
  std::size_t k = 1;
  for (const auto &[ia, ib] : axes) {
    if (ia >= a.rank() || ib >= b.rank()) {
      throw DimensionError("contraction axis out of range");
    }
    if (a_used[ia] || b_used[ib]) throw DimensionError("contraction axis repeated");
    if (a.extent(ia) != b.extent(ib)) {
      throw DimensionError("contracted extents differ: " +
                           std::to_string(a.extent(ia)) + " vs " +
                           std::to_string(b.extent(ib)));
    }
    a_used[ia] = b_used[ib] = true;
    k *= a.extent(ia);
  }

  std::vector<std::size_t> a_perm, b_perm;
  ComplexTensor::Shape out_shape;
  std::size_t m = 1, n = 1;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (!a_used[i]) {
      a_perm.push_back(i);
      out_shape.push_back(a.extent(i));
      m *= a.extent(i);
    }
  }
  for (const auto &[ia, ib] : axes) {
    a_perm.push_back(ia);
    b_perm.push_back(ib);
  }
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (!b_used[i]) {
      b_perm.push_back(i);
      out_shape.push_back(b.extent(i));
      n *= b.extent(i);
    }
  }

  const ComplexTensor ap = a.permuted(a_perm);
  const ComplexTensor bp = b.permuted(b_perm);
  Matrix prod = ap.as_matrix(m, k) * bp.as_matrix(k, n);
  if (out_shape.empty()) return ComplexTensor({}, {prod(0, 0)});
  return ComplexTensor(out_shape,
                       std::vector<cplx>(prod.data(), prod.data() + prod.size()));
}

ComplexTensor contract(
    const ComplexTensor &a, const ComplexTensor &b,
    std::initializer_list<std::pair<std::size_t, std::size_t>> axes) {
  std::vector<std::pair<std::size_t, std::size_t>> v(axes);
  return contract(a, b, std::span<const std::pair<std::size_t, std::size_t>>(v));
}

Matrix SvdResult::reconstruct() const {
  Matrix scaled = left_vectors;
  for (std::size_t j = 0; j < singular_values.size(); ++j) {
    scaled.col(static_cast<Eigen::Index>(j)) *= singular_values[j];
  }
  return scaled * right_vectors_conj_transposed;
}

SvdResult svd_truncated(const Matrix &m, std::size_t max_rank, double cutoff) {
  if (max_rank == 0) throw ValidationError("max_rank must be positive");
  if (cutoff < 0.0) throw ValidationError("cutoff must be non-negative");
  if (!m.allFinite()) throw NumericError("svd input contains non-finite values");

  Matrix U, V;
  Eigen::VectorXd s;
  {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() == Eigen::Success) {
      U = svd.matrixU();
      V = svd.matrixV();
      s = svd.singularValues();
    }
  }
  // The divide-and-conquer solver occasionally breaks down on structured
  // inputs; fall back to Jacobi rotations then.
  if (s.size() == 0 || !U.allFinite() || !V.allFinite() || !s.allFinite()) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("svd did not converge");
    U = svd.matrixU();
    V = svd.matrixV();
    s = svd.singularValues();
  }
  if (!U.allFinite() || !V.allFinite() || !s.allFinite()) {
    throw NumericError("svd produced non-finite factors");
  }

  // BDCSVD returns descending values; a stable partition keeps tie order.
  std::size_t keep = 0;
  const auto full = static_cast<std::size_t>(s.size());
  while (keep < full && keep < max_rank && s(static_cast<Eigen::Index>(keep)) >= cutoff) {
    ++keep;
  }
  if (keep == 0 && full > 0) keep = 1;

  SvdResult out;
  const auto r = static_cast<Eigen::Index>(keep);
  out.left_vectors = U.leftCols(r);
  out.right_vectors_conj_transposed = V.leftCols(r).adjoint();
  out.singular_values.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.singular_values[i] = s(static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = keep; i < full; ++i) {
    const double v = s(static_cast<Eigen::Index>(i));
    out.truncation_weight += v * v;
  }
  return out;
}

SvdResult svd_truncated(const ComplexTensor &m, std::size_t max_rank,
                        double cutoff) {
  return svd_truncated(m.to_matrix(), max_rank, cutoff);
}

bool is_hermitian(const Matrix &m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix &m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  return (m.adjoint() * m - id).cwiseAbs().maxCoeff() <= tol;
}

Matrix herm_exp(const Matrix &h, cplx scale) {
  if (!h.allFinite()) throw NumericError("herm_exp input contains non-finite values");
  if (!is_hermitian(h, 1e-10)) {
    throw ValidationError("herm_exp expects a Hermitian matrix");
  }
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("eigensolver failed");
  const auto &vals = eig.eigenvalues();
  Eigen::VectorXcd phases(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) phases(i) = std::exp(scale * vals(i));
  const Matrix &v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexTensor herm_exp(const ComplexTensor &h, cplx scale) {
  if (h.rank() != 2 || h.extent(0) != h.extent(1)) {
    throw DimensionError("herm_exp expects a square matrix");
  }
  return ComplexTensor::from_matrix(herm_exp(h.to_matrix(), scale));
}

Gate herm_exp(const Gate &h, cplx scale) {
  return Gate(herm_exp(Matrix(h), scale));
}

Gate kron(const Gate1 &a, const Gate1 &b) {
  Gate g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) g(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return g;
}

namespace pauli {
Gate1 identity() { return Gate1::Identity(); }
Gate1 x() {
  Gate1 m;
  m << 0, 1, 1, 0;
  return m;
}
Gate1 y() {
  Gate1 m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Gate1 z() {
  Gate1 m;
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

}  // namespace qmpso
