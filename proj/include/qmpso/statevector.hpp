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
 * Dense statevector helpers used as the ground-truth backend for small
 * chains. Site 0 is the most significant bit of the amplitude index, which
 * matches the order in which an MPS contracts left to right. Spin up is the
 * +1 eigenstate of Z, i.e. basis state 0.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmpso/tensor.hpp"

namespace qmpso {

using Statevector = Eigen::VectorXcd;

enum class Spin : std::uint8_t { up = 0, down = 1 };

/// Largest chain the dense backends accept by default (2^14 amplitudes).
inline constexpr int kDenseLimit = 14;

/// Throws CapabilityError if L exceeds `limit`.
void check_dense_limit(int L, int limit = kDenseLimit);

Statevector product_statevector(std::span<const Spin> labels);

/// Applies g to sites (bond, bond+1) in place.
void apply_gate(Statevector &psi, int L, int bond, const Gate &g);
void apply_gate1(Statevector &psi, int L, int site, const Gate1 &g);

/// Dense 2^L operator of g acting on sites (bond, bond+1).
Matrix embed(const Gate &g, int bond, int L);
Matrix embed1(const Gate1 &g, int site, int L);

/// Schmidt coefficients across the cut that leaves `cut` sites on the left,
/// descending.
std::vector<double> schmidt_values(const Statevector &psi, int L, int cut);

/// -sum lambda^2 log2 lambda^2, skipping weights below 1e-15.
double entropy_bits(std::span<const double> schmidt);

double expectation_z(const Statevector &psi, int L, int site);

}  // namespace qmpso
