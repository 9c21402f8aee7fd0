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

#include <cmath>
#include <algorithm>
#include <random>
#include <sstream>

#include "qmpso/errors.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tfim.hpp"
#include "support/oracles.hpp"

using namespace qmpso;

namespace {

Gate bell_gate() {
  // CNOT after a Hadamard on the first qubit.
  const double s = 1.0 / std::sqrt(2.0);
  Gate1 h;
  h << s, s, s, -s;
  Gate cnot = Gate::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  return cnot * kron(h, pauli::identity());
}

oracle::Vec dense(const MatrixProductState &psi) { return psi.to_statevector(); }

// Left/right isometry residuals around the center.
double isometry_error(const MatrixProductState &psi) {
  double err = 0.0;
  const int c = *psi.center();
  for (int n = 0; n < psi.length(); ++n) {
    const auto &s = psi.site(n);
    const auto l = s.extent(0), r = s.extent(2);
    if (n < c) {
      Matrix a = s.as_matrix(l * 2, r);
      err = std::max(err, (a.adjoint() * a - Matrix::Identity(r, r)).cwiseAbs().maxCoeff());
    } else if (n > c) {
      Matrix b = s.as_matrix(l, 2 * r);
      err = std::max(err, (b * b.adjoint() - Matrix::Identity(l, l)).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

}  // namespace

TEST_CASE("product MPS reproduces the basis state") {
  auto psi = MatrixProductState::from_product(neel_product_state(4));
  oracle::Vec expected = oracle::basis_state({0, 1, 0, 1});
  CHECK((dense(psi) - expected).cwiseAbs().maxCoeff() == 0.0);
  for (int cut = 1; cut < 4; ++cut) CHECK(entropy_vn(psi, cut) == 0.0);
  std::vector<Spin> up_up{Spin::up, Spin::up};
  auto two = MatrixProductState::from_product(up_up);
  CHECK(std::abs(overlap(two, two) - 1.0) < 1e-15);
}

TEST_CASE("Neel and anti-Neel are orthogonal") {
  std::vector<Spin> anti{Spin::down, Spin::up, Spin::down, Spin::up, Spin::down, Spin::up};
  auto a = MatrixProductState::from_product(neel_product_state(6));
  auto b = MatrixProductState::from_product(anti);
  CHECK(std::abs(overlap(a, b)) == 0.0);
}

TEST_CASE("identity gate leaves the state unchanged") {
  std::mt19937_64 rng(1);
  auto psi = MatrixProductState::random(6, 4, rng);
  auto before = psi;
  auto [after, w] = apply_two_site_gate(psi, 2, Gate::Identity());
  CHECK(w == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(std::abs(overlap(after, before)) - 1.0) < 1e-12);
}

TEST_CASE("a Bell gate creates one bit of entanglement") {
  std::vector<Spin> up_up{Spin::up, Spin::up};
  auto psi = MatrixProductState::from_product(up_up);
  psi.apply_gate(0, bell_gate());
  CHECK(entropy_vn(psi, 1) == doctest::Approx(1.0).epsilon(1e-12));
  oracle::Vec expected(4);
  expected << 1, 0, 0, 1;
  expected /= std::sqrt(2.0);
  CHECK((dense(psi) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random gates on an untruncated MPS match the dense state") {
  std::mt19937_64 rng(42);
  auto psi = MatrixProductState::from_product(neel_product_state(4), 4);
  oracle::Vec ref = oracle::neel(4);
  for (int k = 0; k < 12; ++k) {
    const int bond = static_cast<int>(rng() % 3);
    oracle::Dense g = oracle::random_unitary(4, rng);
    psi.apply_gate(bond, Gate(g));
    oracle::apply_two_site(ref, 4, bond, g);
  }
  CHECK((dense(psi) - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("canonical form invariants") {
  std::mt19937_64 rng(7);
  auto psi = MatrixProductState::random(7, 6, rng);
  for (int c : {0, 3, 6}) {
    psi.canonicalize(c);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    CHECK(isometry_error(psi) < 1e-10);
  }
  psi.move_center(2);
  CHECK(isometry_error(psi) < 1e-10);
  const auto dims = psi.bond_dims();
  for (int n = 1; n < psi.length(); ++n) {
    const std::size_t cap = std::min({std::size_t{1} << n, std::size_t{1} << (7 - n),
                                      std::size_t{6}});
    CHECK(dims[n - 1] <= cap);
  }
}

TEST_CASE("overlap of random MPS matches the dense inner product") {
  std::mt19937_64 rng(19);
  auto a = MatrixProductState::random(6, 4, rng);
  auto b = MatrixProductState::random(6, 4, rng);
  const cplx expected = dense(b).dot(dense(a));  // <b|a>
  CHECK(std::abs(overlap(a, b) - expected) < 1e-12);
  CHECK(std::abs(overlap(a, a) - 1.0) < 1e-12);
}

TEST_CASE("random MPS round-trips through a statevector") {
  std::mt19937_64 rng(5);
  auto a = MatrixProductState::random(5, 4, rng);
  oracle::Vec v = dense(a);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  auto b = MatrixProductState::from_statevector(v, 5);
  CHECK((dense(b) - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense conversion is limited") {
  auto big = MatrixProductState::from_product(neel_product_state(15));
  CHECK_THROWS_AS(big.to_statevector(), CapabilityError);
  CHECK_NOTHROW(big.to_statevector(15));
}

TEST_CASE("gate application validates the bond") {
  auto psi = MatrixProductState::from_product(neel_product_state(4));
  CHECK_THROWS_AS(psi.apply_gate(3, Gate::Identity()), DimensionError);
  CHECK_THROWS_AS(psi.apply_gate(-1, Gate::Identity()), DimensionError);
}

TEST_CASE("entropy of a uniform spectrum is log2 chi") {
  for (int chi : {2, 8, 32}) {
    std::vector<double> s(chi, 1.0 / std::sqrt(chi));
    CHECK(entropy_bits(s) == doctest::Approx(std::log2(chi)).epsilon(1e-12));
  }
}

TEST_CASE("zero-time evolution returns the initial state") {
  TfimParams p;
  p.L = 6;
  auto psi = MatrixProductState::from_product(neel_product_state(6), 8);
  auto r = tebd_evolve(psi, p, 0.0);
  CHECK(r.trajectory.size() == 1);
  CHECK(r.entropy.entropy == std::vector<double>{0.0});
}

TEST_CASE("untruncated TEBD equals the dense Trotter circuit") {
  for (int L : {4, 7, 10}) {
    TfimParams p;
    p.L = L;
    p.dt = 0.05;
    auto psi = MatrixProductState::from_product(neel_product_state(L), std::size_t{1} << (L / 2));
    auto r = tebd_evolve(psi, p, 1.0, {.snapshot_every = 0});
    oracle::Vec ref = oracle::neel(L);
    const auto step = trotter_step_gates(p);
    for (int s = 0; s < 20; ++s) {
      for (const auto &g : step.gates) oracle::apply_two_site(ref, L, g.bond, oracle::Dense(g.gate));
    }
    CHECK((dense(r.trajectory.back()) - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("TEBD converges to exact propagation as dt shrinks") {
  const int L = 8;
  const double t = 2.0;
  oracle::Vec exact =
      oracle::expm(cplx(0, -t) * oracle::tfim_hamiltonian(L, 1.0, 1.0)) * oracle::neel(L);
  double infid[2];
  int i = 0;
  for (double dt : {0.01, 0.001}) {
    TfimParams p;
    p.L = L;
    p.dt = dt;
    auto psi = MatrixProductState::from_product(neel_product_state(L), 16);
    auto r = tebd_evolve(psi, p, t, {.snapshot_every = 0});
    const double f = std::norm(exact.dot(dense(r.trajectory.back())));
    infid[i++] = 1.0 - f;
  }
  CHECK(1.0 - infid[0] >= 0.99);
  CHECK(infid[0] / infid[1] >= 10.0);
}

TEST_CASE("half-chain entropy of the untruncated quench matches the dense state") {
  const int L = 12;
  TfimParams p;
  p.L = L;
  auto psi = MatrixProductState::from_product(neel_product_state(L), 64);
  auto r = tebd_evolve(psi, p, 1.5, {.snapshot_every = 0});
  oracle::Vec ref = oracle::neel(L);
  const auto step = trotter_step_gates(p);
  for (int s = 0; s < 150; ++s) {
    for (const auto &g : step.gates) oracle::apply_two_site(ref, L, g.bond, oracle::Dense(g.gate));
  }
  CHECK(std::abs(r.entropy.entropy.back() - oracle::entanglement_entropy(ref, L, 6)) < 1e-8);
  CHECK(std::abs(entropy_vn(r.trajectory.back(), 4) - oracle::entanglement_entropy(ref, L, 4)) <
        1e-8);
}

TEST_CASE("truncated quench respects entropy and normalization bounds") {
  const int L = 10;
  TfimParams p;
  p.L = L;
  for (std::size_t chi : {2u, 4u, 8u}) {
    auto psi = MatrixProductState::from_product(neel_product_state(L), chi);
    double worst_norm = 0.0, worst_excess = 0.0;
    TebdOptions opt;
    opt.snapshot_every = 0;
    opt.on_step = [&](int, const MatrixProductState &s) {
      worst_norm = std::max(worst_norm, std::abs(s.norm() - 1.0));
      for (int cut = 1; cut < L; ++cut) {
        auto sv = s.schmidt_values(cut);
        double w = 0.0;
        for (double x : sv) w += x * x;
        worst_norm = std::max(worst_norm, std::abs(w - 1.0));
        worst_excess = std::max(worst_excess,
                                entropy_bits(sv) - std::log2(static_cast<double>(sv.size())));
      }
    };
    auto r = tebd_evolve(psi, p, 3.0, opt);
    CHECK(worst_norm < 1e-12);
    CHECK(worst_excess < 1e-12);
    CHECK(r.trajectory.back().max_bond() <= chi);

    // Entropy grows without dips until it first peaks.
    const auto &S = r.entropy.entropy;
    const auto peak = std::max_element(S.begin(), S.end()) - S.begin();
    for (long k = 1; k <= peak; ++k) CHECK(S[k] >= S[k - 1] - 1e-3);
  }
}

TEST_CASE("snapshots follow the configured cadence") {
  TfimParams p;
  p.L = 4;
  auto psi = MatrixProductState::from_product(neel_product_state(4), 4);
  auto r = tebd_evolve(psi, p, 0.25, {.snapshot_every = 10});
  CHECK(r.snapshot_times.size() == 4);  // 0, 0.1, 0.2, 0.25
  CHECK(r.snapshot_times.back() == doctest::Approx(0.25));
  CHECK(r.entropy.times.size() == 26);
}

TEST_CASE("t_max detection") {
  EntropyTrace zero{{0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}, 2};
  CHECK(t_max_detect(zero, 8) == 1.0);
  EntropyTrace ramp{{0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.96, 3.0}, 2};
  CHECK(t_max_detect(ramp, 8) == 2.0);
  CHECK(t_max_detect(ramp, 8, 0.0) == 3.0);
  CHECK_THROWS_AS(t_max_detect(EntropyTrace{}, 8), ValidationError);
}

TEST_CASE("entropy trace CSV") {
  EntropyTrace tr{{0.0, 0.01}, {0.0, 0.25}, 6};
  std::ostringstream os;
  tr.write_csv(os, 8);
  CHECK(os.str() == "t,cut,chi,S_vN\n0,6,8,0\n0.01,6,8,0.25\n");
}
