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

#include "qmpso/detail/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmpso/errors.hpp"

namespace qmpso::detail {

namespace {

ComplexTensor from_matrix3(const Matrix &m, std::size_t left, std::size_t phys,
                           std::size_t right) {
  return ComplexTensor({left, phys, right},
                       std::vector<cplx>(m.data(), m.data() + m.size()));
}

}  // namespace

Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(const ComplexTensor &site,
                                                        std::size_t p) {
  const std::size_t l = site.extent(0), d = site.extent(1), r = site.extent(2);
  return {site.data().data() + p * r, static_cast<Eigen::Index>(l),
          static_cast<Eigen::Index>(r),
          Eigen::OuterStride<>(static_cast<Eigen::Index>(d * r))};
}

Chain::Chain(std::vector<ComplexTensor> sites, std::size_t phys)
    : sites_(std::move(sites)), phys_(phys) {
  if (sites_.empty()) throw ValidationError("chain needs at least one site");
  for (std::size_t n = 0; n < sites_.size(); ++n) {
    const auto &s = sites_[n];
    if (s.rank() != 3 || s.extent(1) != phys_) {
      throw DimensionError("site " + std::to_string(n) + " must have shape (l, " +
                           std::to_string(phys_) + ", r)");
    }
    if (n > 0 && sites_[n - 1].extent(2) != s.extent(0)) {
      throw DimensionError("bond extents disagree at bond " + std::to_string(n - 1));
    }
  }
  if (sites_.front().extent(0) != 1 || sites_.back().extent(2) != 1) {
    throw DimensionError("boundary bonds must have extent 1");
  }
}

void Chain::set_site(int n, ComplexTensor t) {
  sites_.at(n) = std::move(t);
  center_.reset();
}

std::vector<std::size_t> Chain::bond_dims() const {
  std::vector<std::size_t> dims;
  for (int n = 0; n + 1 < length(); ++n) dims.push_back(sites_[n].extent(2));
  return dims;
}

std::size_t Chain::max_bond() const {
  std::size_t m = 1;
  for (auto d : bond_dims()) m = std::max(m, d);
  return m;
}

void Chain::shift_right(int n) {
  auto &a = sites_[n];
  auto &b = sites_[n + 1];
  const std::size_t l = a.extent(0), r = a.extent(2);
  const std::size_t rows = l * phys_;
  Eigen::HouseholderQR<Matrix> qr(a.as_matrix(rows, r));
  const std::size_t k = std::min(rows, r);
  const auto ki = static_cast<Eigen::Index>(k);
  Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(rows), ki);
  Matrix rr = qr.matrixQR().topRows(ki).triangularView<Eigen::Upper>();
  const std::size_t br = b.extent(2);
  Matrix nb = rr * b.as_matrix(r, phys_ * br);
  a = from_matrix3(q, l, phys_, k);
  b = from_matrix3(nb, k, phys_, br);
}

void Chain::shift_left(int n) {
  auto &a = sites_[n - 1];
  auto &b = sites_[n];
  const std::size_t l = b.extent(0), r = b.extent(2);
  const std::size_t cols = phys_ * r;
  // b = R^dagger Q^dagger from the QR of b^dagger.
  Matrix bh = b.as_matrix(l, cols).adjoint();
  Eigen::HouseholderQR<Matrix> qr(bh);
  const std::size_t k = std::min(cols, l);
  const auto ki = static_cast<Eigen::Index>(k);
  Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(cols), ki);
  Matrix rr = qr.matrixQR().topRows(ki).triangularView<Eigen::Upper>();
  const std::size_t al = a.extent(0);
  Matrix na = a.as_matrix(al * phys_, l) * rr.adjoint();
  b = from_matrix3(q.adjoint(), k, phys_, r);
  a = from_matrix3(na, al, phys_, k);
}

void Chain::canonicalize(int c) {
  if (c < 0 || c >= length()) throw DimensionError("center out of range");
  for (int n = 0; n < c; ++n) shift_right(n);
  for (int n = length() - 1; n > c; --n) shift_left(n);
  center_ = c;
}

void Chain::move_center(int c) {
  if (c < 0 || c >= length()) throw DimensionError("center out of range");
  if (!center_) {
    canonicalize(c);
    return;
  }
  for (int n = *center_; n < c; ++n) shift_right(n);
  for (int n = *center_; n > c; --n) shift_left(n);
  center_ = c;
}

double Chain::norm() const {
  if (center_) return sites_[*center_].norm();
  return std::sqrt(std::abs(inner(*this)));
}

void Chain::scale(cplx s) { sites_[center_.value_or(0)] *= s; }

double Chain::apply_two_site(int bond, const Matrix &op, const Truncation &trunc,
                             Absorb absorb) {
  if (bond < 0 || bond + 1 >= length()) {
    throw DimensionError("bond " + std::to_string(bond) + " out of range for L = " +
                         std::to_string(length()));
  }
  const std::size_t d2 = phys_ * phys_;
  if (static_cast<std::size_t>(op.rows()) != d2 ||
      static_cast<std::size_t>(op.cols()) != d2) {
    throw DimensionError("two-site operator has the wrong dimension");
  }
  if (!center_) {
    canonicalize(bond);
  } else if (*center_ < bond) {
    move_center(bond);
  } else if (*center_ > bond + 1) {
    move_center(bond + 1);
  }

  auto &a = sites_[bond];
  auto &b = sites_[bond + 1];
  const std::size_t l = a.extent(0), m = a.extent(2), r = b.extent(2);
  Matrix theta = a.as_matrix(l * phys_, m) * b.as_matrix(m, phys_ * r);

  // theta is (l, d*d, r) row-major: each left index owns a (d*d x r) block.
  Matrix applied(static_cast<Eigen::Index>(l * phys_), static_cast<Eigen::Index>(phys_ * r));
  for (std::size_t i = 0; i < l; ++i) {
    Eigen::Map<const Matrix> in(theta.data() + i * d2 * r, static_cast<Eigen::Index>(d2),
                                static_cast<Eigen::Index>(r));
    Eigen::Map<Matrix> out(applied.data() + i * d2 * r, static_cast<Eigen::Index>(d2),
                           static_cast<Eigen::Index>(r));
    out.noalias() = op * in;
  }

  const double block_norm = applied.norm();
  const double cutoff = trunc.cutoff * block_norm;
  SvdResult svd = svd_truncated(applied, trunc.max_bond, cutoff);
  const std::size_t k = svd.rank();
  double kept = 0.0;
  for (double s : svd.singular_values) kept += s * s;
  const double discarded =
      block_norm > 0.0 ? svd.truncation_weight / (block_norm * block_norm) : 0.0;
  if (trunc.renormalize && kept > 0.0) {
    const double f = 1.0 / std::sqrt(kept);
    for (auto &s : svd.singular_values) s *= f;
  }

  Matrix &u = svd.left_vectors;
  Matrix &vh = svd.right_vectors_conj_transposed;
  if (absorb == Absorb::right) {
    for (std::size_t j = 0; j < k; ++j) {
      vh.row(static_cast<Eigen::Index>(j)) *= svd.singular_values[j];
    }
    center_ = bond + 1;
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      u.col(static_cast<Eigen::Index>(j)) *= svd.singular_values[j];
    }
    center_ = bond;
  }
  a = from_matrix3(u, l, phys_, k);
  b = from_matrix3(vh, k, phys_, r);
  return discarded;
}

cplx Chain::inner(const Chain &ket) const {
  if (ket.length() != length()) throw DimensionError("chain length mismatch");
  if (ket.phys_ != phys_) throw DimensionError("physical dimension mismatch");
  Matrix env = Matrix::Ones(1, 1);
  for (int n = 0; n < length(); ++n) {
    const auto &bra = sites_[n];
    const auto &k = ket.sites_[n];
    Matrix next = Matrix::Zero(static_cast<Eigen::Index>(bra.extent(2)),
                               static_cast<Eigen::Index>(k.extent(2)));
    for (std::size_t p = 0; p < phys_; ++p) {
      next.noalias() += slice(bra, p).adjoint() * (env * slice(k, p));
    }
    env = std::move(next);
  }
  return env(0, 0);
}

std::vector<double> Chain::schmidt_values(int cut) const {
  if (cut < 1 || cut >= length()) throw DimensionError("cut out of range");
  if (center_ && *center_ == cut) {
    const auto &s = sites_[cut];
    Matrix m = s.as_matrix(s.extent(0), phys_ * s.extent(2));
    const double nrm = m.norm();
    std::vector<double> out =
        svd_truncated(m, std::numeric_limits<std::size_t>::max(), 0.0).singular_values;
    if (nrm > 0.0)
      for (auto &v : out) v /= nrm;
    return out;
  }
  if (center_ && *center_ == cut - 1) {
    const auto &s = sites_[cut - 1];
    Matrix m = s.as_matrix(s.extent(0) * phys_, s.extent(2));
    const double nrm = m.norm();
    std::vector<double> out =
        svd_truncated(m, std::numeric_limits<std::size_t>::max(), 0.0).singular_values;
    if (nrm > 0.0)
      for (auto &v : out) v /= nrm;
    return out;
  }
  Chain copy = *this;
  copy.move_center(cut);
  return copy.schmidt_values(cut);
}

Chain chain_from_vector(std::span<const cplx> v, int L, std::size_t phys,
                        std::size_t max_bond) {
  if (L < 1) throw ValidationError("chain needs at least one site");
  std::size_t expected = 1;
  for (int n = 0; n < L; ++n) expected *= phys;
  if (v.size() != expected) throw DimensionError("vector length does not match phys^L");

  std::vector<ComplexTensor> sites;
  Matrix rest = Eigen::Map<const Matrix>(v.data(), 1, static_cast<Eigen::Index>(v.size()));
  std::size_t left = 1;
  for (int n = 0; n + 1 < L; ++n) {
    const std::size_t cols = static_cast<std::size_t>(rest.size()) / (left * phys);
    Matrix m = Eigen::Map<const Matrix>(rest.data(), static_cast<Eigen::Index>(left * phys),
                                        static_cast<Eigen::Index>(cols));
    SvdResult svd = svd_truncated(m, max_bond, kDefaultCutoff * m.norm());
    const std::size_t k = svd.rank();
    sites.push_back(from_matrix3(svd.left_vectors, left, phys, k));
    Matrix &vh = svd.right_vectors_conj_transposed;
    for (std::size_t j = 0; j < k; ++j) {
      vh.row(static_cast<Eigen::Index>(j)) *= svd.singular_values[j];
    }
    rest = std::move(vh);
    left = k;
  }
  sites.push_back(from_matrix3(rest, left, phys, 1));
  Chain c(std::move(sites), phys);
  c.canonicalize(L - 1);
  return c;
}

std::vector<cplx> chain_to_vector(const Chain &c) {
  const std::size_t phys = c.phys_dim();
  // Rows enumerate the configurations of the sites contracted so far.
  Matrix acc = Matrix::Ones(1, 1);
  for (int n = 0; n < c.length(); ++n) {
    const auto &s = c.site(n);
    Matrix next(acc.rows() * static_cast<Eigen::Index>(phys),
                static_cast<Eigen::Index>(s.extent(2)));
    for (std::size_t p = 0; p < phys; ++p) {
      Matrix part = acc * slice(s, p);
      for (Eigen::Index row = 0; row < acc.rows(); ++row) {
        next.row(row * static_cast<Eigen::Index>(phys) + static_cast<Eigen::Index>(p)) =
            part.row(row);
      }
    }
    acc = std::move(next);
  }
  return std::vector<cplx>(acc.data(), acc.data() + acc.size());
}

}  // namespace qmpso::detail
