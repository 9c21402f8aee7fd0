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
#include <random>

#include "qmpso/errors.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/reference.hpp"
#include "support/oracles.hpp"

using namespace qmpso;

namespace {

oracle::Vec taylor_propagate(const oracle::Dense &h, const oracle::Vec &psi, double t,
                             int terms) {
  oracle::Vec out = psi, term = psi;
  for (int k = 1; k < terms; ++k) {
    term = (std::complex<double>(0.0, -t) / double(k)) * (h * term);
    out += term;
  }
  return out;
}

oracle::Vec random_state(int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return oracle::Vec(oracle::random_matrix(1 << L, 1, rng)).normalized();
}

}  // namespace

TEST_CASE("dense TFIM Hamiltonian equals the sum of embedded local terms") {
  const TfimParams p{6, 0.8, 1.3, 0.01};
  const auto H = DenseHamiltonian::tfim(p);
  Matrix sum = Matrix::Zero(64, 64);
  const auto terms = local_terms(p);
  for (int b = 0; b < 5; ++b) sum += embed(terms[b], b, 6);
  CHECK((H.matrix() - sum).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(oracle::max_abs(H.matrix() - oracle::tfim_hamiltonian(6, 0.8, 1.3)) < 1e-12);
  CHECK(is_hermitian(H.matrix(), 1e-10));
}

TEST_CASE("dense Hamiltonian validation") {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(DenseHamiltonian(h, 2), ValidationError);
  CHECK_THROWS_AS(DenseHamiltonian(Matrix::Zero(4, 4), 3), DimensionError);
  CHECK_THROWS_AS(DenseHamiltonian::tfim({13, 1.0, 1.0, 0.01}), CapabilityError);
}

TEST_CASE("exact propagation examples") {
  const TfimParams p{4, 1.0, 1.0, 0.01};
  const auto H = DenseHamiltonian::tfim(p);
  const oracle::Vec psi = random_state(4, 1);
  CHECK((exact_propagate(psi, H, 0.0) - psi).cwiseAbs().maxCoeff() < 1e-13);

  const DenseHamiltonian z(-Matrix(pauli::z()), 1);
  Statevector up = Statevector::Zero(2);
  up(0) = 1.0;
  for (double t : {0.3, 2.0, 17.5}) {
    const Statevector out = exact_propagate(up, z, t);
    CHECK(std::abs(expectation_z(out, 1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(out(0) - std::polar(1.0, t)) < 1e-13);
  }

  const TfimParams p2{2, 1.0, 1.0, 0.01};
  const oracle::Vec psi2 = random_state(2, 2);
  const oracle::Vec want = taylor_propagate(oracle::tfim_hamiltonian(2, 1.0, 1.0), psi2, 0.7, 30);
  CHECK((exact_propagate(psi2, DenseHamiltonian::tfim(p2), 0.7) - want).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("exact propagation conserves norm and energy and composes") {
  const TfimParams p{6, 1.0, 1.0, 0.01};
  const auto H = DenseHamiltonian::tfim(p);
  const oracle::Vec psi = random_state(6, 3);
  const double e0 = H.energy(psi);
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    const Statevector out = exact_propagate(psi, H, t);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    CHECK(std::abs(H.energy(out) - e0) < 1e-10);
  }
  const Statevector a = exact_propagate(exact_propagate(psi, H, 1.3), H, 2.4);
  CHECK((a - exact_propagate(psi, H, 3.7)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigendecomposition is shared between copies") {
  const auto H = DenseHamiltonian::tfim({4, 1.0, 1.0, 0.01});
  const auto copy = H;
  CHECK(&H.eigenvalues() == &copy.eigenvalues());
}

TEST_CASE("fine Trotter reference") {
  const TfimParams p{8, 1.0, 1.0, 0.01};
  CHECK((fine_trotter_reference(p, 0.0) - oracle::neel(8)).cwiseAbs().maxCoeff() == 0.0);

  const auto H = DenseHamiltonian::tfim(p);
  const Statevector exact = exact_propagate(oracle::neel(8), H, 3.0);
  CHECK(std::norm(exact.dot(fine_trotter_reference(p, 3.0))) >= 0.999);

  const auto tebd = tebd_evolve(MatrixProductState::from_product(neel_product_state(8)), p, 1.0);
  CHECK((tebd.trajectory.back().to_statevector() - fine_trotter_reference(p, 1.0))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  const double times[] = {0.0, 0.5, 1.0};
  const auto series = fine_trotter_series(p, times);
  REQUIRE(series.size() == 3);
  CHECK((series[1] - fine_trotter_reference(p, 0.5)).cwiseAbs().maxCoeff() == 0.0);
  const double backwards[] = {1.0, 0.5};
  CHECK_THROWS_AS(fine_trotter_series(p, backwards), ValidationError);
}

TEST_CASE("local magnetization") {
  const auto z = local_magnetization(oracle::neel(5));
  REQUIRE(z.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(z[i] == (i % 2 == 0 ? 1.0 : -1.0));

  const Statevector plus = Statevector::Constant(32, 1.0 / std::sqrt(32.0));
  for (double v : local_magnetization(plus)) CHECK(std::abs(v) < 1e-15);

  const oracle::Vec psi = random_state(6, 9);
  const oracle::Dense rho = psi * psi.adjoint();
  const auto zr = local_magnetization(psi);
  for (int i = 0; i < 6; ++i) {
    const double want = (rho * oracle::on_site(oracle::pauli('Z'), i, 6)).trace().real();
    CHECK(std::abs(zr[i] - want) < 1e-12);
    CHECK(std::abs(zr[i]) <= 1.0);
  }
  CHECK_THROWS_AS(local_magnetization(Statevector::Zero(6)), DimensionError);
}
