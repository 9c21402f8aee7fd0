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

#include "qmpso/errors.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tfim.hpp"
#include "support/oracles.hpp"

using namespace qmpso;

TEST_CASE("two-site chain has a single term with both fields") {
  TfimParams p;
  p.L = 2;
  auto terms = local_terms(p);
  REQUIRE(terms.size() == 1);
  oracle::Dense expected = -oracle::kron(oracle::pauli('X'), oracle::pauli('X')) -
                           oracle::kron(oracle::pauli('Z'), oracle::pauli('I')) -
                           oracle::kron(oracle::pauli('I'), oracle::pauli('Z'));
  CHECK(oracle::max_abs(oracle::Dense(terms[0]) - expected) < 1e-15);
}

TEST_CASE("embedded local terms sum to the dense Hamiltonian") {
  for (int L : {3, 4, 6}) {
    TfimParams p;
    p.L = L;
    p.J = 0.7;
    p.h = 1.3;
    auto terms = local_terms(p);
    oracle::Dense sum = oracle::Dense::Zero(1 << L, 1 << L);
    for (int b = 0; b + 1 < L; ++b) sum += oracle::on_bond(oracle::Dense(terms[b]), b, L);
    CHECK(oracle::max_abs(sum - oracle::tfim_hamiltonian(L, p.J, p.h)) < 1e-13);
  }
}

TEST_CASE("zero couplings give zero terms") {
  TfimParams p;
  p.L = 5;
  p.J = 0.0;
  p.h = 0.0;
  for (const auto &t : local_terms(p)) CHECK(t.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter validation") {
  TfimParams p;
  p.L = 1;
  CHECK_THROWS_AS(local_terms(p), ValidationError);
  p.L = 4;
  p.dt = 0.0;
  CHECK_THROWS_AS(trotter_step_gates(p), ValidationError);
}

TEST_CASE("terms of the same parity commute") {
  TfimParams p;
  p.L = 6;
  auto terms = local_terms(p);
  for (int b = 0; b + 3 < p.L; ++b) {
    auto a = oracle::on_bond(oracle::Dense(terms[b]), b, p.L);
    auto c = oracle::on_bond(oracle::Dense(terms[b + 2]), b + 2, p.L);
    CHECK(oracle::max_abs(a * c - c * a) == 0.0);
  }
}

TEST_CASE("a Trotter step applies even bonds before odd bonds") {
  TfimParams p;
  p.L = 4;
  auto s = trotter_step_gates(p);
  REQUIRE(s.gates.size() == 3);
  CHECK(s.gates[0].bond == 0);
  CHECK(s.gates[1].bond == 2);
  CHECK(s.gates[2].bond == 1);
  for (const auto &g : s.gates) CHECK(is_unitary(Matrix(g.gate), 1e-12));
}

TEST_CASE("a composed Trotter step matches the dense product") {
  for (int L : {3, 5}) {
    TfimParams p;
    p.L = L;
    p.dt = 0.1;
    oracle::Dense U = oracle::Dense::Identity(1 << L, 1 << L);
    for (const auto &g : trotter_step_gates(p).gates) {
      U = oracle::on_bond(oracle::Dense(g.gate), g.bond, L) * U;
    }
    CHECK(oracle::max_abs(U - oracle::trotter_step(L, p.J, p.h, p.dt)) < 1e-13);
  }
}

TEST_CASE("a vanishing step is the identity") {
  TfimParams p;
  p.L = 4;
  p.dt = 1e-12;
  for (const auto &g : trotter_step_gates(p).gates) {
    CHECK((g.gate - Gate::Identity()).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("steps_for requires a multiple of dt") {
  CHECK(steps_for(2.2, 0.01) == 220);
  CHECK(steps_for(0.0, 0.1) == 0);
  CHECK(steps_for(3.8, 0.1) == 38);
  CHECK_THROWS_AS(steps_for(0.015, 0.01), ValidationError);
  CHECK_THROWS_AS(steps_for(-1.0, 0.01), ValidationError);
}

TEST_CASE("Neel labels alternate starting up") {
  auto four = neel_product_state(4);
  CHECK(four == std::vector<Spin>{Spin::up, Spin::down, Spin::up, Spin::down});
  CHECK(neel_product_state(1) == std::vector<Spin>{Spin::up});
  auto ten = neel_product_state(10);
  auto psi = product_statevector(ten);
  for (int i = 0; i < 10; ++i) {
    CHECK(expectation_z(psi, 10, i) == doctest::Approx(i % 2 == 0 ? 1.0 : -1.0));
  }
}
