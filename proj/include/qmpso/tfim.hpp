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
 * Transverse-field Ising chain H = -J sum X_i X_{i+1} - h sum Z_i with open
 * boundaries, split into two-site terms for Trotterization.
 *
 * Bonds are 0-based: bond b couples sites b and b+1. A first-order Trotter
 * step applies every even bond first and then every odd bond.
 */

#pragma once

#include <vector>

#include "qmpso/statevector.hpp"
#include "qmpso/tensor.hpp"

namespace qmpso {

struct TfimParams {
  int L = 12;
  double J = 1.0;
  double h = 1.0;
  double dt = 0.01;

  /// Throws ValidationError unless L >= 2 and dt > 0.
  void validate() const;
};

struct BondGate {
  int bond = 0;
  Gate gate = Gate::Identity();
};

struct TrotterSchedule {
  /// Gates of a single step in application order.
  std::vector<BondGate> gates;
  int steps = 1;
};

/// Two-site Hamiltonian terms, one per bond. Field terms on the boundary
/// sites are carried entirely by the single bond touching them, so the
/// embedded terms sum to H exactly.
std::vector<Gate> local_terms(const TfimParams &p);

/// exp(-i h_b dt) for every bond, even bonds first, then odd bonds.
TrotterSchedule trotter_step_gates(const TfimParams &p);

/// Number of dt steps in t; throws unless t is a non-negative integer
/// multiple of dt (to 1e-9 relative).
int steps_for(double t, double dt);

std::vector<Spin> neel_product_state(int L);

}  // namespace qmpso
