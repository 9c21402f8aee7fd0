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
 * Global depolarizing noise: a circuit of N_g two-qubit gates with error rate
 * epsilon leaves rho = alpha |psi><psi| + (1 - alpha) 1/2^L with
 * alpha = exp(-epsilon N_g). Fidelities, magnetizations and operator
 * entanglement of such mixtures, and the derived comparison metrics.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qmpso/mps.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tensor.hpp"

namespace qmpso {

/// Default limit for dense density matrices (2^10 x 2^10).
inline constexpr int kDenseDensityLimit = 10;

struct NoiseModel {
  /// Error rate per two-qubit gate.
  double epsilon = 0.0;

  void validate() const;
};

/// exp(-epsilon * n_gates).
double alpha(const NoiseModel &nm, std::size_t n_gates);

class NoisyState {
 public:
  using Pure = std::variant<Statevector, MatrixProductState>;

  NoisyState(Statevector pure, int L, double alpha);
  NoisyState(MatrixProductState pure, double alpha);

  int length() const { return L_; }
  double alpha() const { return alpha_; }
  const Pure &pure() const { return pure_; }
  /// Dense copy of the pure part (L <= dense limit).
  Statevector pure_statevector() const;

  /// alpha |psi><psi| + (1 - alpha) 1/2^L.
  Matrix density_matrix(int dense_limit = kDenseDensityLimit) const;

 private:
  Pure pure_;
  int L_ = 0;
  double alpha_ = 1.0;
};

/// <ref|rho|ref> = alpha |<ref|psi>|^2 + (1 - alpha)/2^L.
double noisy_fidelity(const NoisyState &rho, const Statevector &ref);

/// 1 - F^(1/L).
double infidelity_per_site(double f, int L);

/// alpha <psi|Z_site|psi>; the maximally mixed part contributes nothing.
double noisy_expectation_z(const NoisyState &rho, int site);

/// Entropy in bits of the normalized operator-Schmidt spectrum of rho across
/// the cut with `cut` sites on the left.
double operator_entropy(const Matrix &rho, int L, int cut,
                        int dense_limit = kDenseDensityLimit);

/// Per-site <Z_i> sampled on a time grid: values[time][site].
struct MagnetizationSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> values;
};

/// (1/(t - t_start)) * integral over [t_start, t] of (1/L) sum_i
/// |z_i - z_exact_i|^2, by the trapezoid rule on the shared grid. t_start
/// and t must be grid points.
double cumulated_error(const MagnetizationSeries &z, const MagnetizationSeries &z_exact,
                       double t_start, double t);

enum class Region { mps_best, qmpso_advantage, trotter_advantage };

std::string_view to_string(Region r);

/// Fidelity ties closer than this count as no advantage.
inline constexpr double kAdvantageTie = 1e-12;

/// trotter_advantage when the Trotter circuit beats the MPS, otherwise
/// qmpso_advantage when the QMPSO circuit does, otherwise mps_best.
Region advantage_classify(double f_mps, double f_trotter, double f_qmpso);

}  // namespace qmpso
