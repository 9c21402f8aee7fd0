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


#include "qmpso/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "qmpso/errors.hpp"
#include "qmpso/log.hpp"

namespace qmpso {

namespace {

using detail::Chain;
using detail::slice;

// Partial contraction between the bottom chain and the conjugated top chain:
// one (chi_bottom x chi_top) block per value of the open wire. A wire value
// is out * ds + s, where s is the spectator leg the gates do not touch (the
// input leg of an operator, absent for states).
using Env = std::vector<Matrix>;

// Weight of the current gate added to each environment before the polar
// update. Environments of gates fed by product inputs are rank deficient,
// and the small bias picks the maximizer closest to the current gate instead
// of an SVD-dependent completion. Stationary points are unchanged and
// Re Tr(E U) still never decreases.
constexpr double kTieBreak = 1e-6;

struct Problem {
  int L = 0;
  std::size_t ds = 1;
  Chain bottom;
  Chain top;
  bool squared = true;  // fidelity is |F|^2 for states, |F| for operators

  double fidelity(cplx f) const { return squared ? std::norm(f) : std::abs(f); }
};

struct SweepLog {
  double min_gain = std::numeric_limits<double>::infinity();
  std::size_t updates = 0;
};

MatrixProductOperator layer_operator(int L, std::span<const PlacedGate> layer,
                                     bool inverse) {
  auto op = MatrixProductOperator::identity(L);
  if (inverse) {
    for (auto it = layer.rbegin(); it != layer.rend(); ++it) {
      op.apply_gate(it->bond, it->u.adjoint(), Side::left);
    }
  } else {
    for (const auto &g : layer) op.apply_gate(g.bond, g.u, Side::left);
  }
  return op;
}

// Exact product of an operator with a chain, acting on the out part of each
// physical index; bond dimensions multiply.
Chain zip(const MatrixProductOperator &op, const Chain &x, std::size_t ds) {
  const int L = x.length();
  const std::size_t d = 2 * ds;
  std::vector<ComplexTensor> sites;
  sites.reserve(L);
  for (int n = 0; n < L; ++n) {
    const ComplexTensor o = op.site(n);
    const ComplexTensor &s = x.site(n);
    const std::size_t ol = o.extent(0), orr = o.extent(3);
    const std::size_t xl = s.extent(0), xr = s.extent(2);
    ComplexTensor out({ol * xl, d, orr * xr});
    for (std::size_t al = 0; al < ol; ++al)
      for (std::size_t ar = 0; ar < orr; ++ar)
        for (std::size_t po = 0; po < 2; ++po)
          for (std::size_t pi = 0; pi < 2; ++pi) {
            const cplx c = o[((al * 2 + po) * 2 + pi) * orr + ar];
            if (c == 0.0) continue;
            for (std::size_t sp = 0; sp < ds; ++sp)
              for (std::size_t bl = 0; bl < xl; ++bl)
                for (std::size_t br = 0; br < xr; ++br) {
                  const cplx v = s[(bl * d + pi * ds + sp) * xr + br];
                  out[((al * xl + bl) * d + po * ds + sp) * (orr * xr) + ar * xr + br] +=
                      c * v;
                }
          }
    sites.push_back(std::move(out));
  }
  return Chain(std::move(sites), d);
}

// Applies a layer (or its inverse) to a chain. States are split gate by gate
// without truncation; operators are multiplied by the layer's MPO.
Chain forward(const Problem &pb, Chain c, std::span<const PlacedGate> layer) {
  if (pb.ds != 1) return zip(layer_operator(pb.L, layer, false), c, pb.ds);
  const detail::Truncation exact;
  for (const auto &g : layer) {
    c.apply_two_site(g.bond, Matrix(g.u), exact, detail::Absorb::right);
  }
  return c;
}

Chain backward(const Problem &pb, Chain c, std::span<const PlacedGate> layer) {
  if (pb.ds != 1) return zip(layer_operator(pb.L, layer, true), c, pb.ds);
  const detail::Truncation exact;
  for (auto it = layer.rbegin(); it != layer.rend(); ++it) {
    c.apply_two_site(it->bond, Matrix(it->u.adjoint()), exact, detail::Absorb::left);
  }
  return c;
}

Env left_start(const ComplexTensor &b0, std::size_t d) {
  Env e(d);
  for (std::size_t w = 0; w < d; ++w) e[w] = slice(b0, w).transpose();
  return e;
}

Env right_start(const ComplexTensor &t_last, std::size_t d) {
  Env e(d);
  for (std::size_t w = 0; w < d; ++w) e[w] = slice(t_last, w).conjugate().transpose();
  return e;
}

// Left environment extended by the bottom site right of the wire:
// m[w1 * d + w2] has shape (chi_bottom', chi_top).
std::vector<Matrix> absorb_bottom(const Env &left, const ComplexTensor &b, std::size_t d) {
  std::vector<Matrix> m(d * d);
  for (std::size_t w2 = 0; w2 < d; ++w2) {
    const Matrix bt = slice(b, w2).transpose();
    for (std::size_t w1 = 0; w1 < d; ++w1) m[w1 * d + w2].noalias() = bt * left[w1];
  }
  return m;
}

Gate environment(const Env &left, const ComplexTensor &b, const ComplexTensor &t,
                 const Env &right, std::size_t ds) {
  const std::size_t d = 2 * ds;
  const auto m = absorb_bottom(left, b, d);
  Gate e = Gate::Zero();
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t s1 = 0; s1 < ds; ++s1) {
      const Matrix tc = slice(t, a1 * ds + s1).conjugate();
      for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t s2 = 0; s2 < ds; ++s2) {
          const Matrix w = (tc * right[a2 * ds + s2].transpose()).transpose();
          for (std::size_t b1 = 0; b1 < 2; ++b1)
            for (std::size_t b2 = 0; b2 < 2; ++b2) {
              const auto &blk = m[(b1 * ds + s1) * d + b2 * ds + s2];
              e(b1 * 2 + b2, a1 * 2 + a2) += blk.cwiseProduct(w).sum();
            }
        }
    }
  return e;
}

Env step_left(const Env &left, const Gate &g, const ComplexTensor &b,
              const ComplexTensor &t, std::size_t ds) {
  const std::size_t d = 2 * ds;
  const auto m = absorb_bottom(left, b, d);
  const auto rows = static_cast<Eigen::Index>(b.extent(2));
  const auto mid = static_cast<Eigen::Index>(t.extent(0));
  Env out(d, Matrix::Zero(rows, static_cast<Eigen::Index>(t.extent(2))));
  Matrix acc(rows, mid);
  for (std::size_t s1 = 0; s1 < ds; ++s1)
    for (std::size_t s2 = 0; s2 < ds; ++s2)
      for (std::size_t o1 = 0; o1 < 2; ++o1)
        for (std::size_t o2 = 0; o2 < 2; ++o2) {
          acc.setZero();
          for (std::size_t i1 = 0; i1 < 2; ++i1)
            for (std::size_t i2 = 0; i2 < 2; ++i2) {
              const cplx c = g(o1 * 2 + o2, i1 * 2 + i2);
              if (c != 0.0) acc += c * m[(i1 * ds + s1) * d + i2 * ds + s2];
            }
          out[o2 * ds + s2].noalias() += acc * slice(t, o1 * ds + s1).conjugate();
        }
  return out;
}

Env step_right(const Env &right, const Gate &g, const ComplexTensor &b,
               const ComplexTensor &t, std::size_t ds) {
  const std::size_t d = 2 * ds;
  const auto rows = static_cast<Eigen::Index>(b.extent(0));
  // p[o2 * 2 + a2] = sum_s2 B[:, (o2, s2), :] R[(a2, s2)]
  std::vector<Matrix> p(4, Matrix::Zero(rows, static_cast<Eigen::Index>(t.extent(2))));
  for (std::size_t o2 = 0; o2 < 2; ++o2)
    for (std::size_t a2 = 0; a2 < 2; ++a2)
      for (std::size_t s2 = 0; s2 < ds; ++s2) {
        p[o2 * 2 + a2].noalias() += slice(b, o2 * ds + s2) * right[a2 * ds + s2];
      }
  Env out(d, Matrix::Zero(rows, static_cast<Eigen::Index>(t.extent(0))));
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t s1 = 0; s1 < ds; ++s1) {
      const Matrix th = slice(t, a1 * ds + s1).adjoint();
      for (std::size_t o2 = 0; o2 < 2; ++o2)
        for (std::size_t a2 = 0; a2 < 2; ++a2) {
          const Matrix q = p[o2 * 2 + a2] * th;
          for (std::size_t o1 = 0; o1 < 2; ++o1) {
            const cplx c = g(a1 * 2 + a2, o1 * 2 + o2);
            if (c != 0.0) out[o1 * ds + s1] += c * q;
          }
        }
    }
  return out;
}

// R[j] closes everything right of gate j in the layer.
std::vector<Env> right_environments(const Chain &bottom, const Chain &top,
                                    const std::vector<Gate> &gates, std::size_t ds) {
  const int L = bottom.length();
  std::vector<Env> r(L - 1);
  r[L - 2] = right_start(top.site(L - 1), 2 * ds);
  for (int j = L - 2; j >= 1; --j) {
    r[j - 1] = step_right(r[j], gates[j], bottom.site(j + 1), top.site(j), ds);
  }
  return r;
}

cplx trace_product(const Gate &e, const Gate &u) { return (e * u).trace(); }

std::vector<Gate> layer_gates(const StaircaseCircuit &c, int l) {
  std::vector<Gate> out;
  for (const auto &g : c.layer(l)) out.push_back(g.u);
  return out;
}

// Updates the gates of one layer in order. Every environment is multiplied by
// `rot` before the polar update; when `fix_phase` is set, rot is first chosen
// so that the current overlap is real and positive, and the overlap before
// any update is stored in `before`. Returns the overlap after the last update.
cplx optimize_layer(const Chain &bottom, const Chain &top, std::vector<Gate> &gates,
                    std::size_t ds, cplx &rot, bool fix_phase, cplx &before, SweepLog &log) {
  const int L = bottom.length();
  const auto right = right_environments(bottom, top, gates, ds);
  Env left = left_start(bottom.site(0), 2 * ds);
  cplx overlap = 0.0;
  for (int j = 0; j + 1 < L; ++j) {
    const Gate e = environment(left, bottom.site(j + 1), top.site(j), right[j], ds);
    if (j == 0 && fix_phase) {
      before = trace_product(e, gates[0]);
      const double a = std::abs(before);
      rot = a > 0.0 ? std::conj(before) / a : cplx(1.0);
    }
    const Gate er = rot * e;
    const double old_value = trace_product(er, gates[j]).real();
    gates[j] = polar_update(er + kTieBreak * er.norm() * gates[j].adjoint());
    const double gain = trace_product(er, gates[j]).real() - old_value;
    log.min_gain = std::min(log.min_gain, gain);
    ++log.updates;
    overlap = trace_product(e, gates[j]);
    if (j + 2 < L) left = step_left(left, gates[j], bottom.site(j + 1), top.site(j), ds);
  }
  return overlap;
}

cplx sweep(const Problem &pb, StaircaseCircuit &c, SweepLog &log, cplx &before) {
  const int N = c.num_layers();
  std::vector<Chain> tops(N);
  tops[N - 1] = pb.top;
  for (int l = N - 1; l >= 1; --l) tops[l - 1] = backward(pb, tops[l], c.layer(l));

  Chain bottom = pb.bottom;
  cplx rot = 1.0;
  cplx overlap = 0.0;
  for (int l = 0; l < N; ++l) {
    auto gates = layer_gates(c, l);
    overlap = optimize_layer(bottom, tops[l], gates, pb.ds, rot, l == 0, before, log);
    const std::size_t start = c.layer_starts()[l];
    for (std::size_t j = 0; j < gates.size(); ++j) c.set_gate(start + j, gates[j]);
    if (l + 1 < N) bottom = forward(pb, std::move(bottom), c.layer(l));
  }
  return overlap;
}

void check_compilable(const StaircaseCircuit &c, int L) {
  if (c.kind() != CircuitKind::staircase) {
    throw ValidationError("only staircase circuits can be compiled");
  }
  if (c.length() != L) {
    throw DimensionError("circuit length " + std::to_string(c.length()) +
                         " does not match target length " + std::to_string(L));
  }
}

StaircaseCircuit initial_circuit(const SweepConfig &cfg, int L, int num_layers) {
  if (!cfg.warm_start) return StaircaseCircuit::staircase(L, num_layers, CircuitInit::identity);
  check_compilable(*cfg.warm_start, L);
  if (cfg.warm_start->num_layers() != num_layers) {
    throw ValidationError("warm start has " + std::to_string(cfg.warm_start->num_layers()) +
                          " layers, expected " + std::to_string(num_layers));
  }
  return *cfg.warm_start;
}

CompileResult run_compile(const Problem &pb, StaircaseCircuit c, const SweepConfig &cfg) {
  CompileResult out;
  SweepLog log;
  double previous = 0.0;
  for (int s = 1; s <= cfg.max_sweeps; ++s) {
    cplx before = 0.0;
    const double f = pb.fidelity(sweep(pb, c, log, before));
    if (s == 1) {
      out.report.initial_fidelity = pb.fidelity(before);
      previous = out.report.initial_fidelity;
    }
    out.report.fidelity_per_sweep.push_back(f);
    out.report.sweeps_used = s;
    if (f - previous < cfg.convergence_delta) {
      out.report.converged = true;
      break;
    }
    previous = f;
  }
  out.report.final_fidelity = out.report.fidelity_per_sweep.back();
  out.report.min_update_gain = log.min_gain;
  out.report.updates = log.updates;
  out.circuit = std::move(c);
  return out;
}

Problem state_problem(const MatrixProductState &target, const MatrixProductState &psi0) {
  if (target.length() != psi0.length()) {
    throw DimensionError("target and initial state lengths differ");
  }
  if (target.length() < 2) throw ValidationError("compilation needs L >= 2");
  return {target.length(), 1, psi0.chain(), target.chain(), true};
}

Problem operator_problem(const MatrixProductOperator &target) {
  if (target.length() < 2) throw ValidationError("compilation needs L >= 2");
  Problem pb{target.length(), 2, MatrixProductOperator::identity(target.length()).chain(),
             target.chain(), false};
  pb.top.scale(std::ldexp(1.0, -target.length()));
  return pb;
}

Gate environment_at(const Problem &pb, const StaircaseCircuit &c, std::size_t k) {
  check_compilable(c, pb.L);
  if (k >= c.num_gates()) {
    throw DimensionError("gate index " + std::to_string(k) + " out of range for " +
                         std::to_string(c.num_gates()) + " gates");
  }
  const auto starts = c.layer_starts();
  const int l = static_cast<int>(std::upper_bound(starts.begin(), starts.end(), k) -
                                 starts.begin()) - 1;
  const int j = static_cast<int>(k - starts[l]);

  Chain top = pb.top;
  for (int m = c.num_layers() - 1; m > l; --m) top = backward(pb, std::move(top), c.layer(m));
  Chain bottom = pb.bottom;
  for (int m = 0; m < l; ++m) bottom = forward(pb, std::move(bottom), c.layer(m));

  const auto gates = layer_gates(c, l);
  const auto right = right_environments(bottom, top, gates, pb.ds);
  Env left = left_start(bottom.site(0), 2 * pb.ds);
  for (int i = 0; i < j; ++i) {
    left = step_left(left, gates[i], bottom.site(i + 1), top.site(i), pb.ds);
  }
  return environment(left, bottom.site(j + 1), top.site(j), right[j], pb.ds);
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("time grid must be ascending");
  }
}

}  // namespace

void SweepConfig::validate() const {
  if (max_sweeps < 1) {
    throw ValidationError("max_sweeps must be at least 1, got " + std::to_string(max_sweeps));
  }
  if (!(convergence_delta > 0.0) || !std::isfinite(convergence_delta)) {
    throw ValidationError("convergence_delta must be a positive number");
  }
}

std::string CompileReport::to_json() const {
  nlohmann::json j;
  j["initial_fidelity"] = initial_fidelity;
  j["final_fidelity"] = final_fidelity;
  j["sweeps_used"] = sweeps_used;
  j["fidelity_per_sweep"] = fidelity_per_sweep;
  j["converged"] = converged;
  j["min_update_gain"] = min_update_gain;
  j["updates"] = updates;
  return j.dump(2);
}

Gate polar_update(const Gate &e) {
  if (!e.allFinite()) throw NumericError("environment tensor is not finite");
  Eigen::JacobiSVD<Gate> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

Gate qmps_environment(const MatrixProductState &target, const StaircaseCircuit &c,
                      const MatrixProductState &psi0, std::size_t k) {
  return environment_at(state_problem(target, psi0), c, k);
}

Gate qmpo_environment(const MatrixProductOperator &target, const StaircaseCircuit &c,
                      std::size_t k) {
  return environment_at(operator_problem(target), c, k);
}

CompileResult qmps_compile(const MatrixProductState &target, const MatrixProductState &psi0,
                           int num_layers, const SweepConfig &cfg) {
  cfg.validate();
  if (num_layers < 1) throw ValidationError("num_layers must be at least 1");
  MatrixProductState t = target;
  t.canonicalize(0);
  MatrixProductState s = psi0;
  s.canonicalize(0);
  if (num_layers < 62 && t.max_bond() > (std::size_t{1} << num_layers)) {
    warn("target bond dimension " + std::to_string(t.max_bond()) + " exceeds 2^" +
         std::to_string(num_layers) + "; the circuit cannot represent it exactly");
  }
  const Problem pb = state_problem(t, s);
  return run_compile(pb, initial_circuit(cfg, pb.L, num_layers), cfg);
}

CompileResult qmpo_compile(const MatrixProductOperator &target, int num_layers,
                           const SweepConfig &cfg) {
  cfg.validate();
  if (num_layers < 1) throw ValidationError("num_layers must be at least 1");
  if (num_layers > max_useful_layers(target.length())) {
    warn(std::to_string(num_layers) + " QMPO layers exceed the useful maximum of " +
         std::to_string(max_useful_layers(target.length())) + " for L = " +
         std::to_string(target.length()));
  }
  const Problem pb = operator_problem(target);
  return run_compile(pb, initial_circuit(cfg, pb.L, num_layers), cfg);
}

CompileResult qmpo_compile(const TfimParams &p, double t, int num_layers,
                           const SweepConfig &cfg, std::size_t target_kappa) {
  return qmpo_compile(trotter_propagator_mpo(p, t, target_kappa), num_layers, cfg);
}

std::vector<TrajectoryPoint> qmps_trajectory(const TfimParams &p, int num_layers,
                                             std::span<const double> t_grid,
                                             const SweepConfig &cfg, std::size_t chi) {
  p.validate();
  cfg.validate();
  check_grid(t_grid);
  if (num_layers < 1) throw ValidationError("num_layers must be at least 1");
  if (chi == 0) chi = std::size_t{1} << std::min(num_layers, 62);

  std::vector<int> steps;
  for (double t : t_grid) steps.push_back(steps_for(t, p.dt));
  const auto neel = neel_product_state(p.L);
  const auto psi0 = MatrixProductState::from_product(neel);

  std::vector<MatrixProductState> targets;
  TebdOptions opt;
  opt.snapshot_every = 0;
  std::size_t next = 0;
  opt.on_step = [&](int step, const MatrixProductState &psi) {
    while (next < steps.size() && steps[next] == step) {
      targets.push_back(psi);
      ++next;
    }
  };
  tebd_evolve(MatrixProductState::from_product(neel, chi), p, steps.back() * p.dt, opt);

  std::vector<TrajectoryPoint> out;
  SweepConfig step_cfg = cfg;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto r = qmps_compile(targets[i], psi0, num_layers, step_cfg);
    step_cfg.warm_start = r.circuit;
    out.push_back({t_grid[i], std::move(r.circuit), std::move(r.report)});
  }
  return out;
}

std::vector<TrajectoryPoint> qmpo_trajectory(const TfimParams &p, int num_layers,
                                             std::span<const double> t_grid,
                                             const SweepConfig &cfg,
                                             std::size_t target_kappa) {
  p.validate();
  cfg.validate();
  check_grid(t_grid);
  const auto schedule = trotter_step_gates(p);
  auto U = MatrixProductOperator::identity(p.L, target_kappa);
  int done = 0;
  std::vector<TrajectoryPoint> out;
  SweepConfig step_cfg = cfg;
  for (double t : t_grid) {
    const int steps = steps_for(t, p.dt);
    for (; done < steps; ++done) {
      for (const auto &bg : schedule.gates) U.apply_gate(bg.bond, bg.gate, Side::left);
    }
    auto r = qmpo_compile(U, num_layers, step_cfg);
    step_cfg.warm_start = r.circuit;
    out.push_back({t, std::move(r.circuit), std::move(r.report)});
  }
  return out;
}

std::optional<double> auto_t_max_mpo(const TfimParams &p, int num_layers,
                                     std::span<const double> t_grid,
                                     const SweepConfig &cfg, double threshold) {
  std::optional<double> best;
  for (const auto &pt : qmpo_trajectory(p, num_layers, t_grid, cfg)) {
    const double f = std::clamp(pt.report.final_fidelity, 0.0, 1.0);
    if (1.0 - std::pow(f, 1.0 / p.L) > threshold) break;
    best = pt.t;
  }
  return best;
}

}  // namespace qmpso
