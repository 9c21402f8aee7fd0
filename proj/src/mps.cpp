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

#include "qmpso/mps.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qmpso/errors.hpp"

namespace qmpso {

namespace {

Matrix gate_as_matrix(const Gate &g) { return Matrix(g); }

std::size_t structural_bond(int L, int cut) {
  const int e = std::min(cut, L - cut);
  return e >= 62 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << e);
}

}  // namespace

MatrixProductState MatrixProductState::from_product(std::span<const Spin> labels,
                                                    std::size_t chi_max) {
  if (labels.empty()) throw ValidationError("product state needs at least one site");
  std::vector<ComplexTensor> sites;
  sites.reserve(labels.size());
  for (auto s : labels) {
    ComplexTensor t({1, 2, 1});
    t[static_cast<std::size_t>(s)] = 1.0;
    sites.push_back(std::move(t));
  }
  MatrixProductState psi(detail::Chain(std::move(sites), 2), chi_max);
  psi.chain_.canonicalize(0);
  return psi;
}

MatrixProductState MatrixProductState::from_statevector(const Statevector &psi, int L,
                                                        std::size_t chi_max) {
  check_dense_limit(L);
  if (psi.size() != (Eigen::Index{1} << L)) {
    throw DimensionError("statevector length does not match 2^L");
  }
  MatrixProductState out(
      detail::chain_from_vector({psi.data(), static_cast<std::size_t>(psi.size())}, L, 2,
                                chi_max),
      chi_max);
  out.canonicalize(L - 1);
  return out;
}

MatrixProductState MatrixProductState::random(int L, std::size_t bond,
                                              std::mt19937_64 &rng) {
  if (L < 1) throw ValidationError("random MPS needs L >= 1");
  std::normal_distribution<double> gauss;
  std::vector<ComplexTensor> sites;
  for (int n = 0; n < L; ++n) {
    const std::size_t l = n == 0 ? 1 : std::min(bond, structural_bond(L, n));
    const std::size_t r = n == L - 1 ? 1 : std::min(bond, structural_bond(L, n + 1));
    ComplexTensor t({l, 2, r});
    for (auto &v : t.data()) v = cplx(gauss(rng), gauss(rng));
    sites.push_back(std::move(t));
  }
  MatrixProductState psi(detail::Chain(std::move(sites), 2), bond);
  psi.canonicalize(0);
  return psi;
}

void MatrixProductState::canonicalize(int center) {
  chain_.canonicalize(center);
  const double n = chain_.norm();
  if (n == 0.0) throw NumericError("cannot normalize a zero state");
  chain_.scale(1.0 / n);
}

void MatrixProductState::move_center(int center) { chain_.move_center(center); }

double MatrixProductState::apply_gate(int bond, const Gate &g, double cutoff) {
  detail::Truncation trunc{chi_max_, cutoff, true};
  return chain_.apply_two_site(bond, gate_as_matrix(g), trunc, detail::Absorb::right);
}

Statevector MatrixProductState::to_statevector(int dense_limit) const {
  check_dense_limit(length(), dense_limit);
  const auto v = detail::chain_to_vector(chain_);
  return Eigen::Map<const Statevector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::pair<MatrixProductState, double> apply_two_site_gate(MatrixProductState psi,
                                                          int bond, const Gate &g) {
  const double w = psi.apply_gate(bond, g);
  return {std::move(psi), w};
}

cplx overlap(const MatrixProductState &psi, const MatrixProductState &phi) {
  if (psi.length() != phi.length()) throw DimensionError("MPS length mismatch");
  return phi.chain().inner(psi.chain());
}

double entropy_vn(const MatrixProductState &psi, int cut) {
  const auto s = psi.schmidt_values(cut);
  return entropy_bits(s);
}

void EntropyTrace::write_csv(std::ostream &os, std::size_t chi, bool header) const {
  if (header) os << "t,cut,chi,S_vN\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i] << ',' << cut << ',' << chi << ',' << entropy[i] << '\n';
  }
  os.precision(old);
}

TebdResult tebd_evolve(const MatrixProductState &psi0, const TfimParams &p,
                       double t_final, const TebdOptions &opt) {
  p.validate();
  if (psi0.length() != p.L) throw DimensionError("state length does not match L");
  const int steps = steps_for(t_final, p.dt);
  const int cut = opt.cut.value_or(p.L / 2);
  if (cut < 1 || cut >= p.L) throw DimensionError("entropy cut out of range");
  const auto schedule = trotter_step_gates(p);

  TebdResult result;
  result.entropy.cut = cut;
  MatrixProductState psi = psi0;
  if (!psi.center()) psi.canonicalize(0);

  auto record = [&](int step) {
    const double t = step * p.dt;
    psi.move_center(cut);
    result.entropy.times.push_back(t);
    result.entropy.entropy.push_back(entropy_vn(psi, cut));
    const bool keep = step == 0 || step == steps ||
                      (opt.snapshot_every > 0 && step % opt.snapshot_every == 0);
    if (keep) {
      result.trajectory.push_back(psi);
      result.snapshot_times.push_back(t);
    }
    if (opt.on_step) opt.on_step(step, psi);
  };

  record(0);
  for (int step = 1; step <= steps; ++step) {
    for (const auto &bg : schedule.gates) {
      result.truncation_weight += psi.apply_gate(bg.bond, bg.gate);
    }
    record(step);
  }
  return result;
}

double t_max_detect(const EntropyTrace &trace, std::size_t chi, double margin) {
  if (trace.times.empty()) throw ValidationError("entropy trace is empty");
  if (trace.times.size() != trace.entropy.size()) {
    throw DimensionError("entropy trace columns differ in length");
  }
  const double threshold = std::log2(static_cast<double>(chi)) - margin;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.entropy[i] >= threshold) return trace.times[i];
  }
  return trace.times.back();
}

}  // namespace qmpso
