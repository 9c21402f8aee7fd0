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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qmpso/circuit.hpp"
#include "qmpso/errors.hpp"
#include "qmpso/noise.hpp"
#include "support/oracles.hpp"

using namespace qmpso;

namespace {

oracle::Vec random_state(int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  oracle::Vec v = oracle::random_matrix(1 << L, 1, rng);
  return v.normalized();
}

oracle::Dense explicit_rho(const oracle::Vec &psi, double a) {
  const auto n = psi.size();
  return a * psi * psi.adjoint() + (1.0 - a) / double(n) * oracle::Dense::Identity(n, n);
}

// Operator Schmidt spectrum from Pauli-string coefficients: rho is expanded
// as sum c[p, q] P_p (x) Q_q, and the Pauli strings are orthogonal with equal
// norms, so the singular values of c are proportional to the operator
// Schmidt values.
double pauli_operator_entropy(const oracle::Dense &rho, int L, int cut) {
  const char names[4] = {'I', 'X', 'Y', 'Z'};
  auto string_op = [&](int code, int n) {
    oracle::Dense op = oracle::Dense::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      op = oracle::kron(op, oracle::pauli(names[code % 4]));
      code /= 4;
    }
    return op;
  };
  const int na = 1 << (2 * cut), nb = 1 << (2 * (L - cut));
  oracle::Dense c(na, nb);
  for (int p = 0; p < na; ++p)
    for (int q = 0; q < nb; ++q) {
      c(p, q) = (rho * oracle::kron(string_op(p, cut), string_op(q, L - cut))).trace();
    }
  Eigen::VectorXd s = Eigen::JacobiSVD<oracle::Dense>(c).singularValues();
  s /= s.norm();
  double h = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const double w = s(i) * s(i);
    if (w > 1e-15) h -= w * std::log2(w);
  }
  return h;
}

MagnetizationSeries series(std::vector<double> times, std::vector<std::vector<double>> v) {
  return {std::move(times), std::move(v)};
}

}  // namespace

TEST_CASE("alpha of the global depolarizing model") {
  CHECK(alpha({0.0}, 1000) == 1.0);
  CHECK(alpha({0.01}, 100) == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(alpha({1e-4}, 0) == 1.0);
  CHECK_THROWS_AS(alpha({-1e-3}, 1), ValidationError);
}

TEST_CASE("noisy fidelity examples") {
  const int L = 10;
  const oracle::Vec ref = random_state(L, 1);
  CHECK(noisy_fidelity(NoisyState(ref, L, 1.0), ref) == doctest::Approx(1.0).epsilon(1e-14));
  const double a = std::exp(-1.0);
  const double f = noisy_fidelity(NoisyState(ref, L, a), ref);
  CHECK(std::abs(f - (a + (1.0 - a) / 1024.0)) < 1e-14);
  CHECK(f == doctest::Approx(0.368497).epsilon(1e-6));
  const oracle::Vec other = random_state(L, 2);
  CHECK(std::abs(noisy_fidelity(NoisyState(other, L, 0.0), ref) - 1.0 / 1024.0) < 1e-16);
  CHECK_THROWS_AS(noisy_fidelity(NoisyState(ref, L, 1.0), random_state(6, 3)), DimensionError);
  CHECK_THROWS_AS(NoisyState(ref, L, 1.5), ValidationError);
  CHECK_THROWS_AS(NoisyState(2.0 * ref, L, 0.5), ValidationError);
}

TEST_CASE("noisy fidelity is affine in alpha") {
  const int L = 6;
  const oracle::Vec ref = random_state(L, 4), psi = random_state(L, 5);
  const double slope = std::norm(ref.dot(psi)) - 1.0 / 64.0;
  const double f0 = noisy_fidelity(NoisyState(psi, L, 0.0), ref);
  for (double a : {0.1, 0.37, 0.8, 1.0}) {
    CHECK(std::abs(noisy_fidelity(NoisyState(psi, L, a), ref) - (f0 + slope * a)) < 1e-14);
  }
}

TEST_CASE("noise model matches an explicit dense mixture at L = 6") {
  const int L = 6;
  const oracle::Vec psi = random_state(L, 6), ref = random_state(L, 7);
  for (double a : {0.0, 0.5, 0.93}) {
    CAPTURE(a);
    const oracle::Dense rho = explicit_rho(psi, a);
    const NoisyState noisy(psi, L, a);
    CHECK(std::abs(noisy_fidelity(noisy, ref) - ref.dot(rho * ref).real()) < 1e-12);
    for (int i = 0; i < L; ++i) {
      const double want = (rho * oracle::on_site(oracle::pauli('Z'), i, L)).trace().real();
      CHECK(std::abs(noisy_expectation_z(noisy, i) - want) < 1e-12);
    }
    CHECK(oracle::max_abs(noisy.density_matrix() - rho) < 1e-15);
  }
}

TEST_CASE("noisy magnetization examples") {
  const int L = 6;
  const auto neel = MatrixProductState::from_product(neel_product_state(L));
  const NoisyState pure(neel, 1.0);
  const NoisyState mixed(neel, 0.0);
  for (int i = 0; i < L; ++i) {
    CHECK(noisy_expectation_z(pure, i) == doctest::Approx(i % 2 == 0 ? 1.0 : -1.0));
    CHECK(noisy_expectation_z(mixed, i) == 0.0);
  }
  CHECK_THROWS_AS(noisy_expectation_z(pure, L), DimensionError);
}

TEST_CASE("infidelity per site") {
  CHECK(infidelity_per_site(1.0, 7) == 0.0);
  CHECK(infidelity_per_site(0.9, 10) == doctest::Approx(0.0104807).epsilon(1e-6));
  const double eps = 1e-3, depth = 5.0;
  for (int L : {50, 100, 200}) {
    const double f = std::exp(-eps * depth * (L - 1));
    const double want = 1.0 - std::exp(-eps * depth);
    CHECK(std::abs(infidelity_per_site(f, L) - want) / want < 2.0 / L);
  }
  double prev = 1.0;
  for (double f = 0.0; f <= 1.0; f += 0.05) {
    const double v = infidelity_per_site(f, 8);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(infidelity_per_site(1.5, 4), ValidationError);
  CHECK_THROWS_AS(infidelity_per_site(-0.1, 4), ValidationError);
}

TEST_CASE("operator entropy examples") {
  const int L = 4;
  const oracle::Dense mixed = oracle::Dense::Identity(16, 16) / 16.0;
  CHECK(std::abs(operator_entropy(mixed, L, 2)) < 1e-12);
  const oracle::Vec prod = oracle::neel(L);
  CHECK(std::abs(operator_entropy(prod * prod.adjoint(), L, 2)) < 1e-12);

  oracle::Vec bell = oracle::Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(operator_entropy(bell * bell.adjoint(), 2, 1) - 2.0) < 1e-12);

  CHECK_THROWS_AS(operator_entropy(oracle::Dense::Identity(2, 2), 11, 5), CapabilityError);
  CHECK_THROWS_AS(operator_entropy(2.0 * mixed, L, 2), ValidationError);
  CHECK_THROWS_AS(operator_entropy(mixed, L, 0), DimensionError);
}

TEST_CASE("operator entropy agrees with the Pauli-basis Schmidt oracle") {
  for (int L : {3, 4, 5}) {
    const oracle::Vec psi = random_state(L, 10 + L);
    for (double a : {1.0, 0.6, 0.01}) {
      const oracle::Dense rho = explicit_rho(psi, a);
      for (int cut = 1; cut < L; ++cut) {
        CAPTURE(L);
        CAPTURE(a);
        CAPTURE(cut);
        CHECK(std::abs(operator_entropy(rho, L, cut) - pauli_operator_entropy(rho, L, cut)) <
              1e-10);
      }
    }
  }
}

TEST_CASE("operator entropy of pure states is twice the entanglement entropy") {
  for (int L : {6, 8}) {
    auto c = new_staircase(L, 3, CircuitInit::random_unitary, 20 + L);
    const oracle::Vec psi = apply_to_state(c, Statevector(oracle::neel(L)));
    const NoisyState pure(psi, L, 1.0);
    const NoisyState mixed(psi, L, 0.0);
    for (int cut : {1, L / 2, L - 2}) {
      CAPTURE(L);
      CAPTURE(cut);
      const double svn = oracle::entanglement_entropy(psi, L, cut);
      CHECK(std::abs(operator_entropy(pure.density_matrix(), L, cut) - 2.0 * svn) < 1e-9);
      CHECK(std::abs(operator_entropy(mixed.density_matrix(), L, cut)) < 1e-12);
    }
  }
}

TEST_CASE("cumulated error examples") {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::vector<double>> exact, offset;
  for (double tau : t) {
    exact.push_back({std::cos(tau), -std::sin(2 * tau), 0.3});
    offset.push_back({std::cos(tau) + 0.2, -std::sin(2 * tau) + 0.2, 0.5});
  }
  const auto z = series(t, exact);
  CHECK(cumulated_error(z, z, 0.1, 0.5) == 0.0);
  CHECK(cumulated_error(series(t, offset), z, 0.1, 0.4) == doctest::Approx(0.04));
  CHECK_THROWS_AS(cumulated_error(z, z, 0.3, 0.3), ValidationError);
  CHECK_THROWS_AS(cumulated_error(z, z, 0.1, 0.45), ValidationError);
  auto shifted = series({0.0, 0.1, 0.2, 0.3, 0.4, 0.6}, exact);
  CHECK_THROWS_AS(cumulated_error(shifted, z, 0.1, 0.4), DimensionError);
}

TEST_CASE("cumulated error of the maximally mixed baseline") {
  // Exact curves cos(w_i t): the time average of (1/L) sum cos^2(w_i t) over
  // [t0, t1] has a closed form.
  const std::vector<double> w{1.0, 1.7, 2.3};
  const double t0 = 2.2, t1 = 5.0;
  std::vector<double> t;
  std::vector<std::vector<double>> exact, zeros;
  for (int k = 0; k <= 5000; ++k) {
    const double tau = k * 0.001;
    t.push_back(tau);
    std::vector<double> row;
    for (double wi : w) row.push_back(std::cos(wi * tau));
    exact.push_back(row);
    zeros.push_back(std::vector<double>(w.size(), 0.0));
  }
  double want = 0.0;
  for (double wi : w) {
    auto prim = [&](double x) { return x / 2 + std::sin(2 * wi * x) / (4 * wi); };
    want += (prim(t1) - prim(t0)) / (t1 - t0);
  }
  want /= double(w.size());
  CHECK(std::abs(cumulated_error(series(t, zeros), series(t, exact), t0, t1) - want) < 1e-6);
}

TEST_CASE("cumulated error is invariant under relabeling sites") {
  const std::vector<double> t{0.0, 0.5, 1.0, 1.5};
  std::vector<std::vector<double>> a, b, ap, bp;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::vector<double> ra(5), rb(5);
    for (int s = 0; s < 5; ++s) {
      ra[s] = u(rng);
      rb[s] = u(rng);
    }
    a.push_back(ra);
    b.push_back(rb);
    std::reverse(ra.begin(), ra.end());
    std::reverse(rb.begin(), rb.end());
    std::rotate(ra.begin(), ra.begin() + 2, ra.end());
    std::rotate(rb.begin(), rb.begin() + 2, rb.end());
    ap.push_back(ra);
    bp.push_back(rb);
  }
  CHECK(cumulated_error(series(t, a), series(t, b), 0.0, 1.5) ==
        doctest::Approx(cumulated_error(series(t, ap), series(t, bp), 0.0, 1.5))
            .epsilon(1e-14));
}

TEST_CASE("advantage classification") {
  CHECK(advantage_classify(0.9, 0.5, 0.6) == Region::mps_best);
  CHECK(advantage_classify(0.9, 0.5, 0.95) == Region::qmpso_advantage);
  CHECK(advantage_classify(0.9, 0.92, 0.95) == Region::trotter_advantage);
  CHECK(advantage_classify(0.9, 0.9, 0.9 + 1e-13) == Region::mps_best);
  CHECK(to_string(Region::qmpso_advantage) == "qmpso_advantage");
}
