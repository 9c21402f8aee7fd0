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
 * Matrix product operators on spin-1/2 chains.
 *
 * Site tensors have shape (kappa_left, 2, 2, kappa_right) with the output
 * (row) index before the input (column) index. Internally the two physical
 * legs are fused into one index out*2+in so the operator can be handled as a
 * chain of vectorized sites.
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "qmpso/detail/chain.hpp"
#include "qmpso/tensor.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

/// Largest chain for which dense operator forms are built by default.
inline constexpr int kDenseOperatorLimit = 12;

/// Which legs a gate is contracted into: left multiplies the operator
/// (U -> g U, output legs), right post-multiplies it (U -> U g, input legs).
enum class Side { left, right };

class MatrixProductOperator {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  /// Bond-1 identity on L sites.
  static MatrixProductOperator identity(int L, std::size_t kappa_max = kUnbounded);
  /// Exact decomposition of a dense 2^L x 2^L operator.
  static MatrixProductOperator from_dense(const Matrix &op, int L,
                                          std::size_t kappa_max = kUnbounded);
  /// Builds an operator from rank-4 site tensors (l, 2, 2, r).
  static MatrixProductOperator from_sites(const std::vector<ComplexTensor> &sites,
                                          std::size_t kappa_max = kUnbounded);

  int length() const { return chain_.length(); }
  std::size_t kappa_max() const { return kappa_max_; }
  void set_kappa_max(std::size_t kappa) { kappa_max_ = kappa; }
  std::vector<std::size_t> bond_dims() const { return chain_.bond_dims(); }
  std::size_t max_bond() const { return chain_.max_bond(); }

  /// Site tensor n reshaped to (l, 2, 2, r).
  ComplexTensor site(int n) const;

  /// Contracts g into sites (bond, bond+1) and re-splits, truncating at
  /// kappa_max without renormalization. Returns the discarded weight
  /// relative to the squared norm of the two-site block.
  double apply_gate(int bond, const Gate &g, Side side, double cutoff = kDefaultCutoff);

  MatrixProductOperator adjoint() const;

  /// Frobenius norm sqrt(Tr(U^dagger U)).
  double frobenius_norm() const { return chain_.norm(); }

  Matrix to_dense(int dense_limit = kDenseOperatorLimit) const;

  const detail::Chain &chain() const { return chain_; }

 private:
  MatrixProductOperator(detail::Chain chain, std::size_t kappa_max)
      : chain_(std::move(chain)), kappa_max_(kappa_max) {}

  detail::Chain chain_;
  std::size_t kappa_max_ = kUnbounded;
};

inline MatrixProductOperator identity_mpo(int L) {
  return MatrixProductOperator::identity(L);
}

/// Value-semantics wrapper around MatrixProductOperator::apply_gate.
std::pair<MatrixProductOperator, double> apply_gate_to_mpo(MatrixProductOperator U,
                                                           int bond, const Gate &g,
                                                           Side side);

/// n = t/dt first-order Trotter steps applied from the left to the identity,
/// truncated at kappa_max.
MatrixProductOperator trotter_propagator_mpo(const TfimParams &p, double t,
                                             std::size_t kappa_max);

/// Tr(U^dagger V) / 2^L.
cplx frobenius_fidelity(const MatrixProductOperator &U, const MatrixProductOperator &V);

/// floor(log4(2^(floor(L/2) - 1))), clamped to at least 1 with a warning.
int max_useful_layers(int L);

/// kappa budget of an exact depth-n staircase: 4^n.
std::size_t layer_kappa_budget(int num_layers);

/// Binary dump of a dense complex matrix: magic "QMPSOMAT", uint32 version,
/// uint64 rows, uint64 cols, then row-major (re, im) doubles, little endian.
void write_dense_matrix(std::ostream &os, const Matrix &m);
Matrix read_dense_matrix(std::istream &is);

}  // namespace qmpso
