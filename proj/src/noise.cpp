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


#include "qmpso/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmpso/errors.hpp"

namespace qmpso {

namespace {

constexpr double kNormTol = 1e-10;

void check_alpha(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw ValidationError("mixing weight alpha must lie in [0, 1], got " + std::to_string(a));
  }
}

std::size_t index_of(std::span<const double> times, double t) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  throw ValidationError("time " + std::to_string(t) + " is not on the sampling grid");
}

}  // namespace

void NoiseModel::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("error rate epsilon must be a non-negative number");
  }
}

double alpha(const NoiseModel &nm, std::size_t n_gates) {
  nm.validate();
  return std::exp(-nm.epsilon * static_cast<double>(n_gates));
}

NoisyState::NoisyState(Statevector pure, int L, double alpha)
    : pure_(std::move(pure)), L_(L), alpha_(alpha) {
  check_alpha(alpha);
  check_dense_limit(L);
  const auto &v = std::get<Statevector>(pure_);
  if (v.size() != (Eigen::Index{1} << L)) {
    throw DimensionError("statevector length does not match 2^L");
  }
  if (std::abs(v.norm() - 1.0) > kNormTol) throw ValidationError("pure part is not normalized");
}

NoisyState::NoisyState(MatrixProductState pure, double alpha)
    : pure_(std::move(pure)), alpha_(alpha) {
  check_alpha(alpha);
  const auto &m = std::get<MatrixProductState>(pure_);
  L_ = m.length();
  if (std::abs(m.norm() - 1.0) > kNormTol) throw ValidationError("pure part is not normalized");
}

Statevector NoisyState::pure_statevector() const {
  if (const auto *v = std::get_if<Statevector>(&pure_)) return *v;
  return std::get<MatrixProductState>(pure_).to_statevector();
}

Matrix NoisyState::density_matrix(int dense_limit) const {
  check_dense_limit(L_, dense_limit);
  const Statevector v = pure_statevector();
  const Eigen::Index n = v.size();
  Matrix rho = alpha_ * (v * v.adjoint());
  rho.diagonal().array() += (1.0 - alpha_) / static_cast<double>(n);
  return rho;
}

double noisy_fidelity(const NoisyState &rho, const Statevector &ref) {
  const Statevector v = rho.pure_statevector();
  if (ref.size() != v.size()) throw DimensionError("reference length does not match state");
  const double a = rho.alpha();
  return a * std::norm(ref.dot(v)) + (1.0 - a) / static_cast<double>(v.size());
}

double infidelity_per_site(double f, int L) {
  if (L < 1) throw ValidationError("L must be positive");
  if (!(f >= -1e-12 && f <= 1.0 + 1e-12)) {
    throw ValidationError("fidelity must lie in [0, 1], got " + std::to_string(f));
  }
  return 1.0 - std::pow(std::clamp(f, 0.0, 1.0), 1.0 / L);
}

double noisy_expectation_z(const NoisyState &rho, int site) {
  if (site < 0 || site >= rho.length()) throw DimensionError("site out of range");
  return rho.alpha() * expectation_z(rho.pure_statevector(), rho.length(), site);
}

double operator_entropy(const Matrix &rho, int L, int cut, int dense_limit) {
  check_dense_limit(L, dense_limit);
  const Eigen::Index n = Eigen::Index{1} << L;
  if (rho.rows() != n || rho.cols() != n) throw DimensionError("density matrix is not 2^L x 2^L");
  if (cut < 1 || cut >= L) throw DimensionError("cut out of range");
  if (!is_hermitian(rho, 1e-10)) throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw ValidationError("density matrix trace is not 1");

  const Eigen::Index da = Eigen::Index{1} << cut;
  const Eigen::Index db = Eigen::Index{1} << (L - cut);
  // rho[(ra, rb), (ca, cb)] -> m[(ra, ca), (rb, cb)]
  Matrix m(da * da, db * db);
  for (Eigen::Index ra = 0; ra < da; ++ra)
    for (Eigen::Index ca = 0; ca < da; ++ca)
      for (Eigen::Index rb = 0; rb < db; ++rb)
        for (Eigen::Index cb = 0; cb < db; ++cb) {
          m(ra * da + ca, rb * db + cb) = rho(ra * db + rb, ca * db + cb);
        }
  const Eigen::VectorXd s = Eigen::BDCSVD<Matrix>(m).singularValues();
  const double norm = s.norm();
  if (norm == 0.0) return 0.0;
  std::vector<double> lambda(s.data(), s.data() + s.size());
  for (auto &x : lambda) x /= norm;
  return entropy_bits(lambda);
}

double cumulated_error(const MagnetizationSeries &z, const MagnetizationSeries &z_exact,
                       double t_start, double t) {
  if (!(t > t_start)) throw ValidationError("cumulated error needs t > t_start");
  if (z.times.size() != z_exact.times.size() || z.values.size() != z.times.size() ||
      z_exact.values.size() != z_exact.times.size()) {
    throw DimensionError("magnetization series are not on the same grid");
  }
  for (std::size_t i = 0; i < z.times.size(); ++i) {
    if (std::abs(z.times[i] - z_exact.times[i]) > 1e-12) {
      throw DimensionError("magnetization series are not on the same grid");
    }
    if (z.values[i].size() != z_exact.values[i].size() || z.values[i].empty()) {
      throw DimensionError("magnetization series have different site counts");
    }
  }
  const std::size_t i0 = index_of(z.times, t_start);
  const std::size_t i1 = index_of(z.times, t);

  auto integrand = [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < z.values[i].size(); ++s) {
      const double d = z.values[i][s] - z_exact.values[i][s];
      acc += d * d;
    }
    return acc / static_cast<double>(z.values[i].size());
  };
  double integral = 0.0;
  double prev = integrand(i0);
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double cur = integrand(i);
    integral += 0.5 * (z.times[i] - z.times[i - 1]) * (prev + cur);
    prev = cur;
  }
  return integral / (z.times[i1] - z.times[i0]);
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::mps_best:
      return "mps_best";
    case Region::qmpso_advantage:
      return "qmpso_advantage";
    case Region::trotter_advantage:
      return "trotter_advantage";
  }
  return "unknown";
}

Region advantage_classify(double f_mps, double f_trotter, double f_qmpso) {
  if (f_trotter > f_mps + kAdvantageTie) return Region::trotter_advantage;
  if (f_qmpso > f_mps + kAdvantageTie) return Region::qmpso_advantage;
  return Region::mps_best;
}

}  // namespace qmpso
