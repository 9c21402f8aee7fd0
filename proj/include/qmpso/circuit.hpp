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
 * Layered circuits of nearest-neighbour two-qubit gates.
 *
 * A staircase layer applies one gate on every bond in ascending order; a
 * brickwork layer is one first-order Trotter step (even bonds, then odd
 * bonds, counting from 0). Bonds are 0-based: bond i couples sites i, i+1.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmpso/mpo.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/statevector.hpp"
#include "qmpso/tensor.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

enum class CircuitKind { staircase, brickwork };

std::string_view to_string(CircuitKind kind);

struct PlacedGate {
  int bond = 0;
  Gate u = Gate::Identity();
};

enum class CircuitInit { identity, random_unitary };

class StaircaseCircuit {
 public:
  StaircaseCircuit() = default;

  /// Validates bond order per layer and unitarity of every gate.
  StaircaseCircuit(int L, CircuitKind kind, std::vector<std::vector<PlacedGate>> layers);

  /// num_layers staircase layers of identities or seeded Haar-random gates.
  static StaircaseCircuit staircase(int L, int num_layers, CircuitInit init,
                                    std::uint64_t seed = 0);
  /// One brickwork layer per Trotter step of p.
  static StaircaseCircuit trotter(const TfimParams &p, int steps);

  int length() const { return L_; }
  CircuitKind kind() const { return kind_; }
  int num_layers() const { return static_cast<int>(layer_starts_.size()); }
  std::size_t num_gates() const { return gates_.size(); }

  std::span<const PlacedGate> gates() const { return gates_; }
  const PlacedGate &gate(std::size_t k) const { return gates_.at(k); }
  /// Replaces the unitary of gate k (must be unitary).
  void set_gate(std::size_t k, const Gate &u);

  /// Indices partitioning the gate list into layers; layer l spans
  /// [layer_starts()[l], layer_starts()[l+1]).
  std::span<const std::size_t> layer_starts() const { return layer_starts_; }
  std::span<const PlacedGate> layer(int l) const;

  /// Appends the layers of `next` (applied after this circuit).
  void append(const StaircaseCircuit &next);

  /// Product of all gates as a dense 2^L operator.
  Matrix to_dense(int dense_limit = kDenseOperatorLimit) const;

  /// Bond-dimension growth factor per layer when acting on an MPS.
  std::size_t state_growth_per_layer() const;
  /// Bond-dimension growth factor per layer of the circuit's MPO.
  std::size_t operator_growth_per_layer() const;

 private:
  int L_ = 0;
  CircuitKind kind_ = CircuitKind::staircase;
  std::vector<PlacedGate> gates_;
  std::vector<std::size_t> layer_starts_;
};

inline StaircaseCircuit new_staircase(int L, int num_layers, CircuitInit init,
                                      std::uint64_t seed = 0) {
  return StaircaseCircuit::staircase(L, num_layers, init, seed);
}

/// Haar-random two-qubit unitary.
Gate random_unitary(std::mt19937_64 &rng);

/// Number of two-qubit gates.
inline std::size_t gate_count(const StaircaseCircuit &c) { return c.num_gates(); }

Statevector apply_to_state(const StaircaseCircuit &c, const Statevector &psi0);

/// Applies the circuit at psi0.chi_max(). Throws CapabilityError when the
/// bond dimension the circuit can generate exceeds chi_max, or when a
/// truncation discards weight anyway.
MatrixProductState apply_to_state(const StaircaseCircuit &c, const MatrixProductState &psi0);

/// Exact MPO of the circuit unitary. Throws CapabilityError when the
/// circuit's bond bound exceeds kappa_budget.
MatrixProductOperator to_mpo(const StaircaseCircuit &c,
                             std::size_t kappa_budget = MatrixProductOperator::kUnbounded);

/// g = global_phase * (post_a (x) post_b) * exp(-i(tx XX + ty YY + tz ZZ))
///     * (pre_a (x) pre_b), with pi/4 >= tx >= ty >= |tz|.
struct KakFactors {
  std::array<Gate1, 2> pre_rotations{Gate1::Identity(), Gate1::Identity()};
  std::array<double, 3> canonical_angles{0.0, 0.0, 0.0};
  std::array<Gate1, 2> post_rotations{Gate1::Identity(), Gate1::Identity()};
  cplx global_phase{1.0, 0.0};

  Gate reconstruct() const;
};

/// exp(-i(tx XX + ty YY + tz ZZ)).
Gate canonical_gate(double tx, double ty, double tz);

KakFactors kak_decompose(const Gate &g);

/// Circuit JSON: {"version": "1", "L": int, "kind": "staircase"|"brickwork",
/// "layers": [[{"sites": [i, i+1], "u": [[re, im] x 16]}]]}, u row-major.
std::string serialize(const StaircaseCircuit &c);
StaircaseCircuit deserialize(std::string_view document);

void write_circuit(const std::filesystem::path &path, const StaircaseCircuit &c);
StaircaseCircuit read_circuit(const std::filesystem::path &path);

}  // namespace qmpso
