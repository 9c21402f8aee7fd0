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
 * Sweep optimizers that fit a staircase circuit to a target matrix product
 * state (QMPS) or to a target propagator MPO (QMPO).
 *
 * Each gate is replaced in turn by the unitary maximizing Re Tr(E U), where E
 * is the gate's environment: the overlap network with that gate removed.
 * Environments of one layer are assembled from left and right partial
 * contractions between the chain produced by the layers below and the
 * target pulled back through the layers above.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmpso/circuit.hpp"
#include "qmpso/mpo.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/tensor.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

struct SweepConfig {
  int max_sweeps = 2000;
  /// Stop once a sweep improves the fidelity by less than this.
  double convergence_delta = 1e-8;
  /// Starting circuit; identity gates when empty.
  std::optional<StaircaseCircuit> warm_start;

  void validate() const;

  static SweepConfig qmps_defaults() { return {2000, 1e-8, std::nullopt}; }
  static SweepConfig qmpo_defaults() { return {1000, 1e-8, std::nullopt}; }
  /// Short budget of 100 sweeps.
  static SweepConfig quick() { return {100, 1e-8, std::nullopt}; }
};

struct CompileReport {
  double initial_fidelity = 0.0;
  double final_fidelity = 0.0;
  int sweeps_used = 0;
  std::vector<double> fidelity_per_sweep;
  bool converged = false;
  /// Smallest change of Re Tr(E U) over all gate updates (never below
  /// rounding for a polar update).
  double min_update_gain = 0.0;
  std::size_t updates = 0;

  std::string to_json() const;
};

struct CompileResult {
  StaircaseCircuit circuit;
  CompileReport report;
};

/// The unitary Y X^dagger from E = X S Y^dagger, which maximizes
/// Re Tr(E U) over unitaries.
Gate polar_update(const Gate &e);

/// Environment of gate k for the overlap <target| C |psi0>, indexed so the
/// overlap equals Tr(E U_k) = sum_ab E(a, b) U_k(b, a).
Gate qmps_environment(const MatrixProductState &target, const StaircaseCircuit &c,
                      const MatrixProductState &psi0, std::size_t k);

/// Environment of gate k for Tr(T^dagger C) / 2^L.
Gate qmpo_environment(const MatrixProductOperator &target, const StaircaseCircuit &c,
                      std::size_t k);

/// Fits a num_layers staircase to the target. The reported fidelity is
/// |<target|C|psi0>|^2 for a normalized target.
CompileResult qmps_compile(const MatrixProductState &target,
                           const MatrixProductState &psi0, int num_layers,
                           const SweepConfig &cfg = SweepConfig::qmps_defaults());

/// Fits a num_layers staircase to the operator. The reported fidelity is
/// |Tr(T^dagger C)| / 2^L.
CompileResult qmpo_compile(const MatrixProductOperator &target, int num_layers,
                           const SweepConfig &cfg = SweepConfig::qmpo_defaults());

/// Compiles against the first-order Trotter propagator of p (step p.dt) at
/// time t, truncated at target_kappa.
CompileResult qmpo_compile(const TfimParams &p, double t, int num_layers,
                           const SweepConfig &cfg = SweepConfig::qmpo_defaults(),
                           std::size_t target_kappa = MatrixProductOperator::kUnbounded);

struct TrajectoryPoint {
  double t = 0.0;
  StaircaseCircuit circuit;
  CompileReport report;
};

/// QMPS circuits along the TEBD trajectory of the Neel state (bond chi,
/// defaulting to 2^num_layers), each grid point warm-started from the
/// previous one. The first point starts from cfg.warm_start or identity.
std::vector<TrajectoryPoint> qmps_trajectory(const TfimParams &p, int num_layers,
                                             std::span<const double> t_grid,
                                             const SweepConfig &cfg =
                                                 SweepConfig::qmps_defaults(),
                                             std::size_t chi = 0);

/// QMPO circuits for the Trotter propagator at each grid time, warm-started
/// along the grid.
std::vector<TrajectoryPoint> qmpo_trajectory(
    const TfimParams &p, int num_layers, std::span<const double> t_grid,
    const SweepConfig &cfg = SweepConfig::qmpo_defaults(),
    std::size_t target_kappa = MatrixProductOperator::kUnbounded);

/// Largest grid time whose QMPO operator infidelity per site, 1 - F^(1/L),
/// stays at or below `threshold`; empty if even the first grid point fails.
std::optional<double> auto_t_max_mpo(const TfimParams &p, int num_layers,
                                     std::span<const double> t_grid,
                                     const SweepConfig &cfg = SweepConfig::qmpo_defaults(),
                                     double threshold = 1e-3);

}  // namespace qmpso
