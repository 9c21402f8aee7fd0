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


#include "qmpso/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qmpso/errors.hpp"

namespace qmpso {

namespace {

using json = nlohmann::json;

constexpr double kUnitaryTol = 1e-12;

std::size_t saturating_pow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    out *= base;
  }
  return out;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

std::vector<int> layer_bond_order(int L, CircuitKind kind) {
  std::vector<int> order;
  if (kind == CircuitKind::staircase) {
    for (int b = 0; b + 1 < L; ++b) order.push_back(b);
  } else {
    for (int parity = 0; parity < 2; ++parity) {
      for (int b = parity; b + 1 < L; b += 2) order.push_back(b);
    }
  }
  return order;
}

}  // namespace

std::string_view to_string(CircuitKind kind) {
  return kind == CircuitKind::staircase ? "staircase" : "brickwork";
}

StaircaseCircuit::StaircaseCircuit(int L, CircuitKind kind,
                                   std::vector<std::vector<PlacedGate>> layers)
    : L_(L), kind_(kind) {
  if (L < 2) throw ValidationError("circuit needs L >= 2");
  const auto order = layer_bond_order(L, kind);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &layer = layers[l];
    if (layer.size() != order.size()) {
      throw ValidationError("layer " + std::to_string(l) + " has " +
                            std::to_string(layer.size()) + " gates, expected " +
                            std::to_string(order.size()));
    }
    layer_starts_.push_back(gates_.size());
    for (std::size_t j = 0; j < layer.size(); ++j) {
      if (layer[j].bond != order[j]) {
        throw ValidationError("layer " + std::to_string(l) + " gate " + std::to_string(j) +
                              " acts on bond " + std::to_string(layer[j].bond) +
                              ", expected bond " + std::to_string(order[j]) + " for a " +
                              std::string(to_string(kind)) + " layer");
      }
      if (!is_unitary(Matrix(layer[j].u), kUnitaryTol)) {
        throw ValidationError("layer " + std::to_string(l) + " gate " + std::to_string(j) +
                              " is not unitary");
      }
      gates_.push_back(layer[j]);
    }
  }
}

StaircaseCircuit StaircaseCircuit::staircase(int L, int num_layers, CircuitInit init,
                                             std::uint64_t seed) {
  if (num_layers < 1) throw ValidationError("staircase needs at least one layer");
  if (L < 2) throw ValidationError("circuit needs L >= 2");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<PlacedGate>> layers(num_layers);
  for (auto &layer : layers) {
    for (int b = 0; b + 1 < L; ++b) {
      layer.push_back({b, init == CircuitInit::identity ? Gate(Gate::Identity())
                                                        : random_unitary(rng)});
    }
  }
  return {L, CircuitKind::staircase, std::move(layers)};
}

StaircaseCircuit StaircaseCircuit::trotter(const TfimParams &p, int steps) {
  if (steps < 0) throw ValidationError("step count must be non-negative");
  const auto schedule = trotter_step_gates(p);
  std::vector<PlacedGate> step;
  for (const auto &bg : schedule.gates) step.push_back({bg.bond, bg.gate});
  return {p.L, CircuitKind::brickwork, std::vector<std::vector<PlacedGate>>(steps, step)};
}

void StaircaseCircuit::set_gate(std::size_t k, const Gate &u) {
  if (k >= gates_.size()) throw DimensionError("gate index out of range");
  if (!is_unitary(Matrix(u), kUnitaryTol)) throw ValidationError("gate is not unitary");
  gates_[k].u = u;
}

std::span<const PlacedGate> StaircaseCircuit::layer(int l) const {
  if (l < 0 || l >= num_layers()) throw DimensionError("layer index out of range");
  const std::size_t begin = layer_starts_[l];
  const std::size_t end = l + 1 < num_layers() ? layer_starts_[l + 1] : gates_.size();
  return std::span<const PlacedGate>(gates_).subspan(begin, end - begin);
}

void StaircaseCircuit::append(const StaircaseCircuit &next) {
  if (next.L_ != L_) throw DimensionError("cannot append circuits of different length");
  if (next.num_layers() > 0 && num_layers() > 0 && next.kind_ != kind_) {
    throw ValidationError("cannot append a " + std::string(to_string(next.kind_)) +
                          " circuit to a " + std::string(to_string(kind_)) + " circuit");
  }
  if (num_layers() == 0) kind_ = next.kind_;
  const std::size_t offset = gates_.size();
  for (auto s : next.layer_starts_) layer_starts_.push_back(s + offset);
  gates_.insert(gates_.end(), next.gates_.begin(), next.gates_.end());
}

Matrix StaircaseCircuit::to_dense(int dense_limit) const {
  check_dense_limit(L_, dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << L_;
  Matrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Statevector v = Statevector::Zero(dim);
    v(c) = 1.0;
    for (const auto &g : gates_) apply_gate(v, L_, g.bond, g.u);
    out.col(c) = v;
  }
  return out;
}

std::size_t StaircaseCircuit::state_growth_per_layer() const {
  return kind_ == CircuitKind::staircase ? 2 : 4;
}

std::size_t StaircaseCircuit::operator_growth_per_layer() const { return 4; }

Gate random_unitary(std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss;
  Gate z;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Gate> qr(z);
  Gate q = qr.householderQ();
  const Gate r = qr.matrixQR();
  for (int j = 0; j < 4; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Statevector apply_to_state(const StaircaseCircuit &c, const Statevector &psi0) {
  const int L = c.length();
  check_dense_limit(L);
  if (psi0.size() != (Eigen::Index{1} << L)) {
    throw DimensionError("statevector length does not match the circuit");
  }
  Statevector psi = psi0;
  for (const auto &g : c.gates()) apply_gate(psi, L, g.bond, g.u);
  return psi;
}

MatrixProductState apply_to_state(const StaircaseCircuit &c, const MatrixProductState &psi0) {
  const int L = c.length();
  if (psi0.length() != L) throw DimensionError("MPS length does not match the circuit");
  const std::size_t structural = saturating_pow(2, L / 2);
  const std::size_t bound = std::min(
      structural, saturating_mul(psi0.max_bond(),
                                 saturating_pow(c.state_growth_per_layer(), c.num_layers())));
  if (psi0.chi_max() < bound) {
    throw CapabilityError("circuit can generate bond dimension " + std::to_string(bound) +
                          " but chi_max is " + std::to_string(psi0.chi_max()));
  }
  MatrixProductState psi = psi0;
  double discarded = 0.0;
  for (const auto &g : c.gates()) discarded += psi.apply_gate(g.bond, g.u);
  if (discarded > 1e-12) {
    throw CapabilityError("circuit evaluation truncated the state (discarded weight " +
                          std::to_string(discarded) + ")");
  }
  return psi;
}

MatrixProductOperator to_mpo(const StaircaseCircuit &c, std::size_t kappa_budget) {
  const int L = c.length();
  const std::size_t structural = saturating_pow(4, L / 2);
  const std::size_t bound =
      std::min(structural, saturating_pow(c.operator_growth_per_layer(), c.num_layers()));
  if (kappa_budget < bound) {
    throw CapabilityError("circuit needs MPO bond dimension " + std::to_string(bound) +
                          " but the budget is " + std::to_string(kappa_budget));
  }
  auto U = MatrixProductOperator::identity(L, kappa_budget);
  for (const auto &g : c.gates()) U.apply_gate(g.bond, g.u, Side::left);
  return U;
}

// ---------------------------------------------------------------------------
// KAK decomposition

Gate canonical_gate(double tx, double ty, double tz) {
  using namespace pauli;
  const Gate h = tx * kron(x(), x()) + ty * kron(y(), y()) + tz * kron(z(), z());
  return herm_exp(h, cplx(0.0, -1.0));
}

Gate KakFactors::reconstruct() const {
  const auto &[tx, ty, tz] = canonical_angles;
  return global_phase * kron(post_rotations[0], post_rotations[1]) *
         canonical_gate(tx, ty, tz) * kron(pre_rotations[0], pre_rotations[1]);
}

namespace {

Gate magic_basis() {
  const double s = 1.0 / std::numbers::sqrt2;
  const cplx i(0.0, 1.0);
  Gate m;
  m << 1, 0, 0, i,
       0, i, 1, 0,
       0, i, -1, 0,
       1, 0, 0, -i;
  return s * m;
}

// Nearest a (x) b to a 4x4 matrix, with a, b in SU(2); `scale` receives the
// remaining scalar.
void kron_factor(const Gate &A, Gate1 &a, Gate1 &b, cplx &scale) {
  Gate r;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) r(i1 * 2 + j1, i2 * 2 + j2) = A(i1 * 2 + i2, j1 * 2 + j2);
  Eigen::JacobiSVD<Gate> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector4cd u = svd.matrixU().col(0);
  const Eigen::Vector4cd v = svd.matrixV().col(0).conjugate();
  a << u(0), u(1), u(2), u(3);
  b << v(0), v(1), v(2), v(3);
  a /= std::sqrt(a.determinant());
  b /= std::sqrt(b.determinant());
  scale = (kron(a, b).adjoint() * A).trace() / 4.0;
}

struct KakState {
  KakFactors f;

  void pre_multiply(const Gate1 &pa, const Gate1 &pb) {
    f.pre_rotations[0] = pa * f.pre_rotations[0];
    f.pre_rotations[1] = pb * f.pre_rotations[1];
  }
  void post_multiply(const Gate1 &pa, const Gate1 &pb) {
    f.post_rotations[0] = f.post_rotations[0] * pa;
    f.post_rotations[1] = f.post_rotations[1] * pb;
  }

  // theta_i -> theta_i - k pi/2, using exp(-i pi/2 PP) = -i PP.
  void shift(int i, int k) {
    if (k == 0) return;
    const Gate1 p = i == 0 ? pauli::x() : i == 1 ? pauli::y() : pauli::z();
    f.canonical_angles[i] -= k * std::numbers::pi / 2;
    const int kk = ((k % 4) + 4) % 4;
    static const cplx powers[4] = {1.0, cplx(0, -1), -1.0, cplx(0, 1)};
    f.global_phase *= powers[kk];
    if (k % 2 != 0) pre_multiply(p, p);
  }

  // Negates the two angles other than `keep` by conjugating with P_keep (x) I.
  void flip_pair(int keep) {
    const Gate1 w = keep == 0 ? pauli::x() : keep == 1 ? pauli::y() : pauli::z();
    for (int i = 0; i < 3; ++i) {
      if (i != keep) f.canonical_angles[i] = -f.canonical_angles[i];
    }
    post_multiply(w, pauli::identity());
    pre_multiply(w, pauli::identity());
  }

  void swap_angles(int i, int j) {
    if (i > j) std::swap(i, j);
    const cplx im(0.0, 1.0);
    const double s = 1.0 / std::numbers::sqrt2;
    Gate1 v;
    if (i == 0 && j == 1) {
      v << 1, 0, 0, im;  // S
    } else if (i == 1 && j == 2) {
      v << s, -im * s, -im * s, s;  // Rx(pi/2)
    } else {
      v << s, s, s, -s;  // Hadamard
    }
    std::swap(f.canonical_angles[i], f.canonical_angles[j]);
    post_multiply(v, v);
    pre_multiply(v.adjoint(), v.adjoint());
  }

  void reduce_to_weyl_chamber() {
    auto &t = f.canonical_angles;
    const double half_pi = std::numbers::pi / 2;
    for (int i = 0; i < 3; ++i) {
      shift(i, static_cast<int>(std::floor((t[i] + std::numbers::pi / 4) / half_pi)));
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < 2; ++i) {
        if (std::abs(t[i]) < std::abs(t[i + 1])) swap_angles(i, i + 1);
      }
    }
    if (t[0] < 0 && t[1] < 0) {
      flip_pair(2);
    } else if (t[0] < 0) {
      flip_pair(1);
    } else if (t[1] < 0) {
      flip_pair(0);
    }
    if (std::abs(t[0] - std::numbers::pi / 4) < 1e-12 && t[2] < 0) {
      shift(0, 1);
      flip_pair(1);
    }
  }
};

std::optional<KakFactors> kak_attempt(const Gate &g, double mix) {
  const Gate m = magic_basis();
  const cplx det = g.determinant();
  const cplx phase0 = std::pow(det, 0.25);
  const Gate su = g / phase0;
  const Gate up = m.adjoint() * su * m;
  const Gate sym = up.transpose() * up;

  const Eigen::Matrix4d mixed = sym.real() + mix * sym.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(mixed);
  Eigen::Matrix4d p = eig.eigenvectors();
  if (p.determinant() < 0) p.col(0) = -p.col(0);
  const Gate pc = p.cast<cplx>();
  const Gate diag = pc.transpose() * sym * pc;

  Eigen::Vector4d phi;
  for (int j = 0; j < 4; ++j) phi(j) = std::arg(diag(j, j)) / 2.0;
  auto k1_of = [&](const Eigen::Vector4d &ph) {
    Eigen::Vector4cd inv;
    for (int j = 0; j < 4; ++j) inv(j) = std::polar(1.0, -ph(j));
    return Gate(up * pc * inv.asDiagonal());
  };
  Gate k1 = k1_of(phi);
  if (k1.determinant().real() < 0) {
    phi(0) += std::numbers::pi;
    k1 = k1_of(phi);
  }

  // Phases of exp(i g0) exp(-i(a XX + b YY + c ZZ)) in the magic basis.
  using namespace pauli;
  const Eigen::Vector4d sx = (m.adjoint() * kron(x(), x()) * m).diagonal().real();
  const Eigen::Vector4d sy = (m.adjoint() * kron(y(), y()) * m).diagonal().real();
  const Eigen::Vector4d sz = (m.adjoint() * kron(z(), z()) * m).diagonal().real();
  const double g0 = phi.sum() / 4.0;

  KakState st;
  st.f.canonical_angles = {-phi.dot(sx) / 4.0, -phi.dot(sy) / 4.0, -phi.dot(sz) / 4.0};

  cplx s1, s2;
  kron_factor(m * k1 * m.adjoint(), st.f.post_rotations[0], st.f.post_rotations[1], s1);
  kron_factor(m * pc.transpose() * m.adjoint(), st.f.pre_rotations[0],
              st.f.pre_rotations[1], s2);
  st.f.global_phase = phase0 * std::polar(1.0, g0) * s1 * s2;
  st.reduce_to_weyl_chamber();

  if (!st.f.reconstruct().allFinite()) return std::nullopt;
  return st.f;
}

}  // namespace

KakFactors kak_decompose(const Gate &g) {
  if (!g.allFinite()) throw ValidationError("gate has non-finite entries");
  if (!is_unitary(Matrix(g), 1e-10)) throw ValidationError("KAK input is not unitary");
  static constexpr double kMixes[] = {0.6180339887498949, 1.4142135623730951,
                                      0.3183098861837907, 2.718281828459045,
                                      0.1234567890123457};
  std::optional<KakFactors> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (double mix : kMixes) {
    auto f = kak_attempt(g, mix);
    if (!f) continue;
    const double err = (f->reconstruct() - g).cwiseAbs().maxCoeff();
    if (err < best_err) {
      best_err = err;
      best = f;
    }
    if (err < 1e-12) break;
  }
  if (!best || best_err > 1e-8) {
    throw NumericError("KAK decomposition failed to reconstruct the gate");
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kSchemaVersion = "1";

const json &require(const json &obj, const char *field, const std::string &where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field \"" + field + "\"");
  }
  return *it;
}

}  // namespace

std::string serialize(const StaircaseCircuit &c) {
  json layers = json::array();
  for (int l = 0; l < c.num_layers(); ++l) {
    json layer = json::array();
    for (const auto &g : c.layer(l)) {
      json u = json::array();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) u.push_back({g.u(i, j).real(), g.u(i, j).imag()});
      layer.push_back({{"sites", {g.bond, g.bond + 1}}, {"u", std::move(u)}});
    }
    layers.push_back(std::move(layer));
  }
  json doc = {{"version", kSchemaVersion},
              {"L", c.length()},
              {"kind", to_string(c.kind())},
              {"layers", std::move(layers)}};
  return doc.dump();
}

StaircaseCircuit deserialize(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("circuit JSON is malformed: ") + e.what());
  }
  const std::string root = "circuit";
  const json &version = require(doc, "version", root);
  if (!version.is_string()) throw ParseError("circuit.version: expected a string");
  if (version.get<std::string>() != kSchemaVersion) {
    throw ParseError("circuit.version: document version \"" + version.get<std::string>() +
                     "\" is not supported; this build reads version \"" +
                     std::string(kSchemaVersion) +
                     "\", upgrade qmpso to read newer circuit files");
  }
  const json &Lj = require(doc, "L", root);
  if (!Lj.is_number_integer()) throw ParseError("circuit.L: expected an integer");
  const int L = Lj.get<int>();
  const json &kind_j = require(doc, "kind", root);
  if (!kind_j.is_string()) throw ParseError("circuit.kind: expected a string");
  CircuitKind kind;
  if (kind_j == "staircase") {
    kind = CircuitKind::staircase;
  } else if (kind_j == "brickwork") {
    kind = CircuitKind::brickwork;
  } else {
    throw ParseError("circuit.kind: unknown kind \"" + kind_j.get<std::string>() + "\"");
  }
  const json &layers_j = require(doc, "layers", root);
  if (!layers_j.is_array()) throw ParseError("circuit.layers: expected an array");

  std::vector<std::vector<PlacedGate>> layers;
  for (std::size_t l = 0; l < layers_j.size(); ++l) {
    const std::string lwhere = "circuit.layers[" + std::to_string(l) + "]";
    if (!layers_j[l].is_array()) throw ParseError(lwhere + ": expected an array");
    std::vector<PlacedGate> layer;
    for (std::size_t k = 0; k < layers_j[l].size(); ++k) {
      const std::string where = lwhere + "[" + std::to_string(k) + "]";
      const json &g = layers_j[l][k];
      const json &sites = require(g, "sites", where);
      if (!sites.is_array() || sites.size() != 2 || !sites[0].is_number_integer() ||
          !sites[1].is_number_integer()) {
        throw ParseError(where + ".sites: expected two integers");
      }
      const int i = sites[0].get<int>();
      if (sites[1].get<int>() != i + 1) {
        throw ParseError(where + ".sites: gates must act on neighbouring sites [i, i+1]");
      }
      const json &u = require(g, "u", where);
      if (!u.is_array() || u.size() != 16) {
        throw ParseError(where + ".u: expected 16 complex entries");
      }
      PlacedGate pg;
      pg.bond = i;
      for (int e = 0; e < 16; ++e) {
        const json &z = u[e];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
          throw ParseError(where + ".u[" + std::to_string(e) + "]: expected [re, im]");
        }
        pg.u(e / 4, e % 4) = cplx(z[0].get<double>(), z[1].get<double>());
      }
      layer.push_back(pg);
    }
    layers.push_back(std::move(layer));
  }
  try {
    return StaircaseCircuit(L, kind, std::move(layers));
  } catch (const ValidationError &e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
}

void write_circuit(const std::filesystem::path &path, const StaircaseCircuit &c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << serialize(c) << '\n';
  if (!os) throw IoError("failed to write " + path.string());
}

StaircaseCircuit read_circuit(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return deserialize(ss.str());
}

}  // namespace qmpso
