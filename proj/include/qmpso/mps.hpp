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
 * Matrix product states with a bounded bond dimension, TEBD time evolution
 * and entanglement diagnostics.
 *
 * A state is kept in mixed canonical form: tensors left of the center are
 * left isometries, tensors right of it are right isometries, so Schmidt
 * values at the bonds next to the center are read off directly.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qmpso/detail/chain.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tensor.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

class MatrixProductState {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  /// Bond-1 state of the given local basis labels.
  static MatrixProductState from_product(std::span<const Spin> labels,
                                         std::size_t chi_max = kUnbounded);
  /// Exact decomposition of a dense statevector (L <= dense limit).
  static MatrixProductState from_statevector(const Statevector &psi, int L,
                                             std::size_t chi_max = kUnbounded);
  /// Normalized state with Gaussian random tensors of bond `bond`.
  static MatrixProductState random(int L, std::size_t bond, std::mt19937_64 &rng);

  int length() const { return chain_.length(); }
  std::size_t chi_max() const { return chi_max_; }
  void set_chi_max(std::size_t chi) { chi_max_ = chi; }
  std::optional<int> center() const { return chain_.center(); }
  const ComplexTensor &site(int n) const { return chain_.site(n); }
  std::vector<std::size_t> bond_dims() const { return chain_.bond_dims(); }
  std::size_t max_bond() const { return chain_.max_bond(); }

  void canonicalize(int center);
  void move_center(int center);
  double norm() const { return chain_.norm(); }

  /// Applies g to sites (bond, bond+1), truncating to chi_max and
  /// renormalizing. Returns the discarded weight.
  double apply_gate(int bond, const Gate &g, double cutoff = kDefaultCutoff);

  /// Schmidt coefficients at the cut with `cut` sites on the left.
  std::vector<double> schmidt_values(int cut) const { return chain_.schmidt_values(cut); }

  Statevector to_statevector(int dense_limit = kDenseLimit) const;

  const detail::Chain &chain() const { return chain_; }
  detail::Chain &chain() { return chain_; }

 private:
  MatrixProductState(detail::Chain chain, std::size_t chi_max)
      : chain_(std::move(chain)), chi_max_(chi_max) {}

  detail::Chain chain_;
  std::size_t chi_max_ = kUnbounded;
};

/// Value-semantics wrapper around MatrixProductState::apply_gate.
std::pair<MatrixProductState, double> apply_two_site_gate(MatrixProductState psi,
                                                          int bond, const Gate &g);

/// <phi|psi>.
cplx overlap(const MatrixProductState &psi, const MatrixProductState &phi);

/// von Neumann entropy in bits at the cut with `cut` sites on the left.
double entropy_vn(const MatrixProductState &psi, int cut);

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> entropy;
  int cut = 0;

  /// Columns t,cut,chi,S_vN.
  void write_csv(std::ostream &os, std::size_t chi, bool header = true) const;
};

struct TebdOptions {
  /// Keep every n-th step in the trajectory (0 keeps only the endpoints).
  int snapshot_every = 10;
  /// Entropy cut; defaults to L/2.
  std::optional<int> cut;
  /// Called after every step with (step index, state).
  std::function<void(int, const MatrixProductState &)> on_step;
};

struct TebdResult {
  std::vector<MatrixProductState> trajectory;
  std::vector<double> snapshot_times;
  EntropyTrace entropy;
  double truncation_weight = 0.0;
};

/// First-order Trotter evolution of psi0 to t_final (a multiple of p.dt),
/// truncating at psi0.chi_max(). Entropy is recorded at every step.
TebdResult tebd_evolve(const MatrixProductState &psi0, const TfimParams &p,
                       double t_final, const TebdOptions &opt = {});

/// First time the entropy reaches log2(chi) - margin; the last sample time if
/// it never does.
double t_max_detect(const EntropyTrace &trace, std::size_t chi, double margin = 0.05);

}  // namespace qmpso
