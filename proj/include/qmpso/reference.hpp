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
 * Ground-truth dynamics on dense statevectors: exact propagation from the
 * eigendecomposition of the Hamiltonian, and the fine-step Trotter reference
 * that fidelities are measured against.
 */

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qmpso/mpo.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tensor.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

class DenseHamiltonian {
 public:
  /// Sum of the embedded TFIM local terms. Limited to kDenseOperatorLimit
  /// sites, since the eigendecomposition needs the full matrix.
  static DenseHamiltonian tfim(const TfimParams &p, int dense_limit = kDenseOperatorLimit);

  /// Any Hermitian 2^L x 2^L matrix (checked to 1e-10).
  DenseHamiltonian(Matrix h, int L, int dense_limit = kDenseOperatorLimit);

  int length() const { return L_; }
  const Matrix &matrix() const { return *h_; }

  /// Eigenvalues ascending; computed on first use and shared by copies.
  const Eigen::VectorXd &eigenvalues() const;
  const Eigen::MatrixXcd &eigenvectors() const;

  /// <psi|H|psi> for normalized psi.
  double energy(const Statevector &psi) const;

 private:
  struct Spectrum;
  const Spectrum &spectrum() const;

  int L_ = 0;
  std::shared_ptr<const Matrix> h_;
  std::shared_ptr<Spectrum> spectrum_;
};

/// exp(-i H t) psi0.
Statevector exact_propagate(const Statevector &psi0, const DenseHamiltonian &H, double t);

/// Neel state evolved by first-order Trotter steps of p.dt to time t.
Statevector fine_trotter_reference(const TfimParams &p, double t);

/// Reference states at every time of an ascending grid (multiples of p.dt).
std::vector<Statevector> fine_trotter_series(const TfimParams &p,
                                             std::span<const double> times);

/// <Z_i> for every site; L is taken from the length of psi.
std::vector<double> local_magnetization(const Statevector &psi);

}  // namespace qmpso
