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

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qmpso/tensor.hpp"

namespace qmpso::detail {

struct Truncation {
  std::size_t max_bond = std::numeric_limits<std::size_t>::max();
  /// Relative to the Frobenius norm of the two-site block being split.
  double cutoff = kDefaultCutoff;
  /// Rescale kept singular values to unit total weight.
  bool renormalize = false;
};

/// Which side of a split receives the singular values (and the center).
enum class Absorb { left, right };

/// Open-boundary chain of rank-3 tensors (chi_left, phys, chi_right) kept in
/// mixed canonical form around an optional orthogonality center. Shared
/// storage for states (phys = 2) and vectorized operators (phys = 4).
class Chain {
 public:
  Chain() = default;
  Chain(std::vector<ComplexTensor> sites, std::size_t phys);

  int length() const { return static_cast<int>(sites_.size()); }
  std::size_t phys_dim() const { return phys_; }
  const ComplexTensor &site(int n) const { return sites_.at(n); }
  /// Replaces a tensor; drops the canonical-form bookkeeping.
  void set_site(int n, ComplexTensor t);
  std::optional<int> center() const { return center_; }

  /// Bond extents between consecutive sites (length L-1).
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond() const;

  /// Left-orthonormalizes sites before c and right-orthonormalizes sites
  /// after c.
  void canonicalize(int c);
  void move_center(int c);

  /// Frobenius norm of the encoded vector.
  double norm() const;
  void scale(cplx s);

  /// Contracts sites (bond, bond+1), applies `op` to their combined physical
  /// index (dimension phys^2, left site most significant) and splits again.
  /// Returns the discarded weight relative to the block's squared norm.
  double apply_two_site(int bond, const Matrix &op, const Truncation &trunc,
                        Absorb absorb);

  /// <this|ket>.
  cplx inner(const Chain &ket) const;

  /// Schmidt coefficients at the cut with `cut` sites on the left,
  /// normalized by the chain norm.
  std::vector<double> schmidt_values(int cut) const;

 private:
  void shift_right(int n);  // center n -> n+1
  void shift_left(int n);   // center n -> n-1

  std::vector<ComplexTensor> sites_;
  std::size_t phys_ = 2;
  std::optional<int> center_;
};

/// Exact (up to max_bond) left-to-right SVD decomposition of a vector over
/// L sites of dimension phys, first site most significant. The center ends
/// on the last site.
Chain chain_from_vector(std::span<const cplx> v, int L, std::size_t phys,
                        std::size_t max_bond = std::numeric_limits<std::size_t>::max());

/// Full contraction back to a vector, first site most significant.
std::vector<cplx> chain_to_vector(const Chain &c);

/// Strided view of the physical slice `p` of a site tensor as a
/// (chi_left x chi_right) matrix.
Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(const ComplexTensor &site,
                                                        std::size_t p);

}  // namespace qmpso::detail
