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


#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "qmpso/circuit.hpp"
#include "qmpso/compiler.hpp"
#include "qmpso/detail/parallel.hpp"
#include "qmpso/errors.hpp"
#include "qmpso/mpo.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/noise.hpp"
#include "qmpso/pipeline.hpp"
#include "qmpso/reference.hpp"
#include "svg.hpp"

namespace qmpso {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Outputs {
 public:
  Outputs(const RunConfig &cfg, std::string prefix)
      : cfg_(cfg), dir_(cfg.output_dir), prefix_(std::move(prefix)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw IoError("cannot create output directory " + dir_.string());
    }
  }

  void write(const std::string &name, const std::string &content) {
    const auto path = dir_ / (prefix_ + "_" + name);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw IoError("cannot write " + path.string());
    files_.push_back(path);
  }

  ExperimentOutput finish() {
    ExperimentOutput out;
    out.files = files_;
    out.manifest = write_manifest(dir_, prefix_, cfg_, files_);
    return out;
  }

 private:
  const RunConfig &cfg_;
  fs::path dir_;
  std::string prefix_;
  std::vector<fs::path> files_;
};

struct FidelityRow {
  double t, epsilon;
  std::string method;
  double f;
  int L;
};

std::string fidelity_csv(const std::vector<FidelityRow> &rows) {
  std::ostringstream os;
  os << "t,epsilon,method,F,infidelity_per_site\n";
  for (const auto &r : rows) {
    os << num(r.t) << ',' << num(r.epsilon) << ',' << r.method << ',' << num(r.f) << ','
       << num(infidelity_per_site(std::clamp(r.f, 0.0, 1.0), r.L)) << '\n';
  }
  return os.str();
}

std::string layer_label(const char *kind, int layers) {
  return std::string(kind) + "_NL" + std::to_string(layers);
}

bool on_or_before(double t, double bound) { return t <= bound + 1e-9; }

/// Truncated TEBD states from the Neel state at each grid time.
std::vector<MatrixProductState> tebd_states(const TfimParams &p, std::size_t chi,
                                            std::span<const double> times,
                                            EntropyTrace *entropy = nullptr) {
  std::map<int, std::size_t> wanted;
  for (std::size_t i = 0; i < times.size(); ++i) wanted.emplace(steps_for(times[i], p.dt), i);
  std::vector<std::optional<MatrixProductState>> slots(times.size());
  TebdOptions opt;
  opt.snapshot_every = 0;
  opt.on_step = [&](int step, const MatrixProductState &psi) {
    for (auto [it, end] = wanted.equal_range(step); it != end; ++it) slots[it->second] = psi;
  };
  const auto neel = neel_product_state(p.L);
  const auto psi0 = MatrixProductState::from_product(neel, chi);
  const double t_end = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  auto result = tebd_evolve(psi0, p, t_end, opt);
  if (entropy) *entropy = std::move(result.entropy);
  std::vector<MatrixProductState> out;
  out.reserve(times.size());
  for (auto &s : slots) out.push_back(std::move(*s));
  return out;
}

double state_fidelity(const Statevector &ref, const Statevector &psi) {
  return std::norm(ref.dot(psi));
}

struct CompileRow {
  std::string kind;
  double t;
  CompileReport report;
};

std::string compile_csv(const std::vector<CompileRow> &rows) {
  std::ostringstream os;
  os << "kind,t,initial_fidelity,final_fidelity,sweeps,converged,min_update_gain\n";
  for (const auto &r : rows) {
    os << r.kind << ',' << num(r.t) << ',' << num(r.report.initial_fidelity) << ','
       << num(r.report.final_fidelity) << ',' << r.report.sweeps_used << ','
       << (r.report.converged ? 1 : 0) << ',' << num(r.report.min_update_gain) << '\n';
  }
  return os.str();
}

/// Noiseless circuit states of the QMPSO construction on a time grid. Times
/// up to t_max_mps use the QMPS compiled at that time; later times compose
/// the QMPS at t_max_mps with QMPO blocks.
struct QmpsoSeries {
  std::vector<Statevector> states;
  std::vector<std::size_t> gates;
  std::vector<CompileRow> compiles;
};

QmpsoSeries qmpso_series(const RunConfig &c, std::span<const double> times) {
  const TfimParams p = c.model();
  const int step_mps = steps_for(c.t_max_mps, c.dt);
  const int step_mpo = steps_for(c.t_max_mpo, c.dt);

  std::vector<double> qmps_times;
  std::set<int> delta_steps;
  for (double t : times) {
    const int s = steps_for(t, c.dt);
    if (s <= step_mps) {
      qmps_times.push_back(s * c.dt);
    } else if ((s - step_mps) % step_mpo != 0) {
      delta_steps.insert((s - step_mps) % step_mpo);
    }
  }
  const bool beyond = std::any_of(times.begin(), times.end(),
                                  [&](double t) { return steps_for(t, c.dt) > step_mps; });
  if (beyond || qmps_times.empty() || steps_for(qmps_times.back(), c.dt) != step_mps) {
    qmps_times.push_back(step_mps * c.dt);
  }
  std::sort(qmps_times.begin(), qmps_times.end());
  qmps_times.erase(std::unique(qmps_times.begin(), qmps_times.end()), qmps_times.end());

  QmpsoSeries out;
  const auto qmps = qmps_trajectory(p, c.n_layers_mps, qmps_times,
                                    c.qmps_sweeps(c.n_layers_mps), c.chi_mps);
  std::map<int, const StaircaseCircuit *> qmps_at;
  for (const auto &pt : qmps) {
    qmps_at[steps_for(pt.t, c.dt)] = &pt.circuit;
    out.compiles.push_back({layer_label("qmps", c.n_layers_mps), pt.t, pt.report});
  }

  std::vector<TrajectoryPoint> qmpo;
  std::map<int, const StaircaseCircuit *> qmpo_at;
  if (beyond) {
    std::vector<double> qmpo_times;
    for (int s : delta_steps) qmpo_times.push_back(s * c.dt);
    qmpo_times.push_back(step_mpo * c.dt);
    qmpo = qmpo_trajectory(p, c.n_layers_mpo, qmpo_times, c.qmpo_sweeps(c.n_layers_mpo));
    for (const auto &pt : qmpo) {
      qmpo_at[steps_for(pt.t, c.dt)] = &pt.circuit;
      out.compiles.push_back({layer_label("qmpo", c.n_layers_mpo), pt.t, pt.report});
    }
  }

  const Statevector neel = product_statevector(neel_product_state(c.L));
  std::vector<Statevector> blocks;
  for (double t : times) {
    const int s = steps_for(t, c.dt);
    if (s <= step_mps) {
      out.states.push_back(apply_to_state(*qmps_at.at(s), neel));
      out.gates.push_back(static_cast<std::size_t>(c.L - 1) * c.n_layers_mps);
      continue;
    }
    const auto schedule = c.schedule(s * c.dt);
    const auto d = schedule.decompose();
    if (blocks.empty()) blocks.push_back(apply_to_state(*qmps_at.at(step_mps), neel));
    while (static_cast<int>(blocks.size()) <= d.m) {
      blocks.push_back(apply_to_state(*qmpo_at.at(step_mpo), blocks.back()));
    }
    Statevector psi = blocks[d.m];
    if (d.delta_steps > 0) psi = apply_to_state(*qmpo_at.at(d.delta_steps), psi);
    out.states.push_back(std::move(psi));
    out.gates.push_back(schedule.gate_count(c.L));
  }
  return out;
}

/// Noiseless Trotter circuit states with step c.trotter_dt and their gate
/// counts.
std::pair<std::vector<Statevector>, std::vector<std::size_t>> trotter_series(
    const RunConfig &c, std::span<const double> times) {
  TfimParams q = c.model();
  q.dt = c.trotter_dt;
  auto states = fine_trotter_series(q, times);
  std::vector<std::size_t> gates;
  for (double t : times) {
    gates.push_back(static_cast<std::size_t>(steps_for(t, q.dt)) * (c.L - 1));
  }
  return {std::move(states), std::move(gates)};
}

std::vector<double> column(const std::vector<std::vector<double>> &m, std::size_t j) {
  std::vector<double> out;
  for (const auto &row : m) out.push_back(row[j]);
  return out;
}

// ---------------------------------------------------------------------------

ExperimentOutput fig2(const RunConfig &c) {
  const TfimParams p = c.model();
  const auto chis = c.chis;
  std::vector<EntropyTrace> traces(chis.size());
  detail::parallel_for(chis.size(), c.threads, [&](std::size_t i) {
    const auto psi0 = MatrixProductState::from_product(neel_product_state(c.L), chis[i]);
    TebdOptions opt;
    opt.snapshot_every = c.snapshot_every;
    traces[i] = tebd_evolve(psi0, p, steps_for(c.time_grid().back(), c.dt) * c.dt, opt).entropy;
  });

  Outputs out(c, "fig2");
  std::ostringstream csv;
  std::ostringstream tmax;
  csv << "t,cut,chi,S_vN\n";
  tmax << "chi,t_max,S_peak\n";
  svg::LinePlot plot{"Half-chain entanglement entropy", "t", "S_vN (bits)", {}, false};
  for (std::size_t i = 0; i < chis.size(); ++i) {
    const auto &tr = traces[i];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      csv << num(tr.times[k]) << ',' << tr.cut << ',' << chis[i] << ',' << num(tr.entropy[k])
          << '\n';
    }
    tmax << chis[i] << ',' << num(t_max_detect(tr, chis[i])) << ','
         << num(*std::max_element(tr.entropy.begin(), tr.entropy.end())) << '\n';
    plot.series.push_back({"chi=" + std::to_string(chis[i]), tr.times, tr.entropy, false});
  }
  out.write("entropy.csv", csv.str());
  out.write("t_max.csv", tmax.str());
  out.write("entropy.svg", svg::render(plot));
  return out.finish();
}

ExperimentOutput fig4(const RunConfig &c) {
  const TfimParams p = c.model();
  const auto grid = c.time_grid();
  std::vector<std::vector<TrajectoryPoint>> runs(c.layers.size());
  detail::parallel_for(c.layers.size(), c.threads, [&](std::size_t i) {
    const int l = c.layers[i];
    runs[i] = qmps_trajectory(p, l, grid, c.qmps_sweeps(l), std::size_t{1} << l);
  });

  const Statevector neel = product_statevector(neel_product_state(c.L));
  std::vector<FidelityRow> rows;
  std::ostringstream entropy;
  entropy << "t,cut,chi,S_vN\n";
  svg::LinePlot plot{"QMPS infidelity per site", "t", "1 - F^(1/L)", {}, true};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int l = c.layers[i];
    svg::Series s{layer_label("qmps", l), {}, {}, false};
    for (const auto &pt : runs[i]) {
      rows.push_back({pt.t, 0.0, s.label, pt.report.final_fidelity, c.L});
      const auto psi = apply_to_state(pt.circuit, neel);
      entropy << num(pt.t) << ',' << c.L / 2 << ',' << (std::size_t{1} << l) << ','
              << num(entropy_bits(schmidt_values(psi, c.L, c.L / 2))) << '\n';
      s.x.push_back(pt.t);
      s.y.push_back(infidelity_per_site(pt.report.final_fidelity, c.L));
    }
    plot.series.push_back(std::move(s));
  }
  Outputs out(c, "fig4");
  out.write("fidelity.csv", fidelity_csv(rows));
  out.write("entropy.csv", entropy.str());
  out.write("fidelity.svg", svg::render(plot));
  return out.finish();
}

ExperimentOutput fig5(const RunConfig &c) {
  const TfimParams p = c.model();
  const auto grid = c.time_grid();
  std::vector<std::vector<TrajectoryPoint>> runs(c.layers.size());
  std::vector<std::vector<double>> trotter(c.layers.size());
  detail::parallel_for(c.layers.size(), c.threads, [&](std::size_t i) {
    const int l = c.layers[i];
    runs[i] = qmpo_trajectory(p, l, grid, c.qmpo_sweeps(l));
    for (double t : grid) {
      if (t <= 0.0) {
        trotter[i].push_back(1.0);
        continue;
      }
      TfimParams q = p;
      q.dt = t / l;
      const auto target = trotter_propagator_mpo(p, t, MatrixProductOperator::kUnbounded);
      const auto mpo = to_mpo(StaircaseCircuit::trotter(q, l));
      trotter[i].push_back(std::abs(frobenius_fidelity(target, mpo)));
    }
  });

  std::vector<FidelityRow> rows;
  svg::LinePlot plot{"Operator fidelity", "t", "|F_op|", {}, false};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int l = c.layers[i];
    svg::Series q{layer_label("qmpo", l), {}, {}, false};
    svg::Series tr{layer_label("trotter", l), {}, {}, true};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      rows.push_back({grid[k], 0.0, q.label, runs[i][k].report.final_fidelity, c.L});
      rows.push_back({grid[k], 0.0, tr.label, trotter[i][k], c.L});
      q.x.push_back(grid[k]);
      q.y.push_back(runs[i][k].report.final_fidelity);
      tr.x.push_back(grid[k]);
      tr.y.push_back(trotter[i][k]);
    }
    plot.series.push_back(std::move(q));
    plot.series.push_back(std::move(tr));
  }
  Outputs out(c, "fig5");
  out.write("fidelity.csv", fidelity_csv(rows));
  out.write("fidelity.svg", svg::render(plot));
  return out.finish();
}

/// Epsilons drawn in line plots: all of them when there are few, otherwise
/// the two ends and the middle.
std::vector<std::size_t> plotted(const std::vector<double> &eps) {
  if (eps.size() <= 3) {
    std::vector<std::size_t> all(eps.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return {0, eps.size() / 2, eps.size() - 1};
}

ExperimentOutput fig6(const RunConfig &c) {
  const TfimParams p = c.model();
  const auto grid = c.time_grid();
  std::vector<Statevector> ref;
  std::vector<double> f_mps(grid.size());
  std::pair<std::vector<Statevector>, std::vector<std::size_t>> trotter;
  QmpsoSeries qmpso;
  detail::parallel_for(3, c.threads, [&](std::size_t task) {
    if (task == 0) {
      ref = fine_trotter_series(p, grid);
      const auto mps = tebd_states(p, c.chi_mps, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        f_mps[k] = state_fidelity(ref[k], mps[k].to_statevector());
      }
    } else if (task == 1) {
      trotter = trotter_series(c, grid);
    } else {
      qmpso = qmpso_series(c, grid);
    }
  });

  const double mixed = std::ldexp(1.0, -c.L);
  std::vector<FidelityRow> rows;
  std::ostringstream adv;
  adv << "t,epsilon,region\n";
  std::vector<std::vector<int>> cells(c.epsilons.size(), std::vector<int>(grid.size()));
  std::vector<std::vector<double>> f_trot(c.epsilons.size()), f_q(c.epsilons.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double pt = state_fidelity(ref[k], trotter.first[k]);
    const double pq = state_fidelity(ref[k], qmpso.states[k]);
    for (std::size_t e = 0; e < c.epsilons.size(); ++e) {
      const NoiseModel nm{c.epsilons[e]};
      const double at = alpha(nm, trotter.second[k]);
      const double aq = alpha(nm, qmpso.gates[k]);
      const double ft = at * pt + (1 - at) * mixed;
      const double fq = aq * pq + (1 - aq) * mixed;
      rows.push_back({grid[k], c.epsilons[e], "mps", f_mps[k], c.L});
      rows.push_back({grid[k], c.epsilons[e], "trotter", ft, c.L});
      rows.push_back({grid[k], c.epsilons[e], "qmpso", fq, c.L});
      const Region r = advantage_classify(f_mps[k], ft, fq);
      adv << num(grid[k]) << ',' << num(c.epsilons[e]) << ',' << to_string(r) << '\n';
      cells[e][k] = static_cast<int>(r);
      f_trot[e].push_back(ft);
      f_q[e].push_back(fq);
    }
  }

  svg::LinePlot plot{"Infidelity per site", "t", "1 - F^(1/L)", {}, true};
  const auto ips = [&](const std::vector<double> &f) {
    std::vector<double> y;
    for (double v : f) y.push_back(infidelity_per_site(std::clamp(v, 0.0, 1.0), c.L));
    return y;
  };
  plot.series.push_back({"mps chi=" + std::to_string(c.chi_mps), grid, ips(f_mps), false});
  for (std::size_t e : plotted(c.epsilons)) {
    const std::string tag = " eps=" + short_num(c.epsilons[e]);
    plot.series.push_back({"qmpso" + tag, grid, ips(f_q[e]), false});
    plot.series.push_back({"trotter" + tag, grid, ips(f_trot[e]), true});
  }
  svg::HeatMap map{"Advantage diagram", "t", "epsilon", grid, c.epsilons, cells,
                   {"mps_best", "qmpso_advantage", "trotter_advantage"},
                   {"#1f5f3a", "#3fa55b", "#a8dba8"}, true};

  Outputs out(c, "fig6");
  out.write("fidelity.csv", fidelity_csv(rows));
  out.write("advantage.csv", adv.str());
  out.write("compile.csv", compile_csv(qmpso.compiles));
  out.write("fidelity.svg", svg::render(plot));
  out.write("advantage.svg", svg::render(map));
  return out.finish();
}

ExperimentOutput fig7(const RunConfig &c) {
  const TfimParams p = c.model();
  const auto grid = c.time_grid();
  const bool aligned = std::any_of(grid.begin(), grid.end(), [&](double t) {
    return steps_for(t, c.dt) == steps_for(c.t_max_mps, c.dt);
  });
  if (!aligned) throw ValidationError("t_max_mps must be a point of the time grid");

  std::vector<Statevector> ref;
  std::vector<MatrixProductState> mps;
  std::pair<std::vector<Statevector>, std::vector<std::size_t>> trotter;
  QmpsoSeries qmpso;
  detail::parallel_for(3, c.threads, [&](std::size_t task) {
    if (task == 0) {
      ref = fine_trotter_series(p, grid);
      mps = tebd_states(p, c.chi_mps, grid);
    } else if (task == 1) {
      trotter = trotter_series(c, grid);
    } else {
      qmpso = qmpso_series(c, grid);
    }
  });

  struct Method {
    std::string name;
    MagnetizationSeries z;
  };
  std::vector<Method> methods;
  const auto series = [&](std::string name, auto &&value) {
    Method m{std::move(name), {grid, {}}};
    for (std::size_t k = 0; k < grid.size(); ++k) m.z.values.push_back(value(k));
    methods.push_back(std::move(m));
  };
  series("exact", [&](std::size_t k) { return local_magnetization(ref[k]); });
  series("mps", [&](std::size_t k) { return local_magnetization(mps[k].to_statevector()); });
  series("mixed", [&](std::size_t) { return std::vector<double>(c.L, 0.0); });
  for (double eps : c.epsilons) {
    const NoiseModel nm{eps};
    const std::string tag = "_eps=" + short_num(eps);
    series("trotter" + tag, [&](std::size_t k) {
      NoisyState rho(trotter.first[k], c.L, alpha(nm, trotter.second[k]));
      std::vector<double> z(c.L);
      for (int i = 0; i < c.L; ++i) z[i] = noisy_expectation_z(rho, i);
      return z;
    });
    series("qmpso" + tag, [&](std::size_t k) {
      NoisyState rho(qmpso.states[k], c.L, alpha(nm, qmpso.gates[k]));
      std::vector<double> z(c.L);
      for (int i = 0; i < c.L; ++i) z[i] = noisy_expectation_z(rho, i);
      return z;
    });
  }

  std::ostringstream mag;
  mag << "t,site,method,z\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (const auto &m : methods) {
      for (int i = 0; i < c.L; ++i) {
        mag << num(grid[k]) << ',' << i << ',' << m.name << ',' << num(m.z.values[k][i])
            << '\n';
      }
    }
  }

  std::ostringstream cum;
  cum << "t,method,epsilon_c\n";
  svg::LinePlot err{"Cumulated magnetization error", "t", "epsilon_c", {}, true};
  svg::LinePlot zplot{"Magnetization of site " + std::to_string(c.L / 2), "t", "<Z>", {},
                      false};
  const MagnetizationSeries &exact = methods.front().z;
  for (const auto &m : methods) {
    zplot.series.push_back({m.name, grid, column(m.z.values, c.L / 2), m.name == "mixed"});
    if (m.name == "exact") continue;
    svg::Series s{m.name, {}, {}, m.name == "mixed"};
    for (double t : grid) {
      if (on_or_before(t, c.t_max_mps)) continue;
      const double e = cumulated_error(m.z, exact, c.t_max_mps, t);
      cum << num(t) << ',' << m.name << ',' << num(e) << '\n';
      s.x.push_back(t);
      s.y.push_back(e);
    }
    err.series.push_back(std::move(s));
  }

  Outputs out(c, "fig7");
  out.write("magnetization.csv", mag.str());
  out.write("cumulated_error.csv", cum.str());
  out.write("compile.csv", compile_csv(qmpso.compiles));
  out.write("magnetization.svg", svg::render(zplot));
  out.write("cumulated_error.svg", svg::render(err));
  return out.finish();
}

ExperimentOutput fig8(const RunConfig &c) {
  const auto grid = c.time_grid();
  std::vector<double> operator_grid;
  for (double t : grid) {
    if (t > 0.0) operator_grid.push_back(t);
  }
  struct Cell {
    int L, layers;
    std::vector<TrajectoryPoint> qmps, qmpo;
  };
  std::vector<Cell> cells;
  for (int L : c.sizes) {
    for (int l : c.layers) cells.push_back({L, l, {}, {}});
  }
  detail::parallel_for(cells.size(), c.threads, [&](std::size_t i) {
    RunConfig ci = c;
    ci.L = cells[i].L;
    const TfimParams p = ci.model();
    const int l = cells[i].layers;
    cells[i].qmps = qmps_trajectory(p, l, grid, ci.qmps_sweeps(l), std::size_t{1} << l);
    if (!operator_grid.empty()) {
      cells[i].qmpo = qmpo_trajectory(p, l, operator_grid, ci.qmpo_sweeps(l));
    }
  });

  std::vector<FidelityRow> rows;
  svg::LinePlot plot{"Infidelity per site across chain lengths", "t", "1 - F^(1/L)", {},
                     true};
  for (const auto &cell : cells) {
    const std::string tag = "_L" + std::to_string(cell.L) + "_NL" + std::to_string(cell.layers);
    svg::Series s{"qmps" + tag, {}, {}, false};
    for (const auto &pt : cell.qmps) {
      rows.push_back({pt.t, 0.0, s.label, pt.report.final_fidelity, cell.L});
      s.x.push_back(pt.t);
      s.y.push_back(infidelity_per_site(pt.report.final_fidelity, cell.L));
    }
    svg::Series o{"qmpo" + tag, {}, {}, true};
    for (const auto &pt : cell.qmpo) {
      rows.push_back({pt.t, 0.0, o.label, pt.report.final_fidelity, cell.L});
      o.x.push_back(pt.t);
      o.y.push_back(infidelity_per_site(pt.report.final_fidelity, cell.L));
    }
    plot.series.push_back(std::move(s));
    if (!o.x.empty()) plot.series.push_back(std::move(o));
  }
  Outputs out(c, "fig8");
  out.write("fidelity.csv", fidelity_csv(rows));
  out.write("fidelity.svg", svg::render(plot));
  return out.finish();
}

ExperimentOutput fig9(const RunConfig &c) {
  if (c.L > kDenseDensityLimit) {
    throw CapabilityError("operator entropy needs L <= " +
                          std::to_string(kDenseDensityLimit));
  }
  const TfimParams p = c.model();
  const auto grid = c.time_grid();
  std::vector<MatrixProductState> mps;
  std::pair<std::vector<Statevector>, std::vector<std::size_t>> trotter;
  QmpsoSeries qmpso;
  detail::parallel_for(3, c.threads, [&](std::size_t task) {
    if (task == 0) {
      mps = tebd_states(p, c.chi_mps, grid);
    } else if (task == 1) {
      trotter = trotter_series(c, grid);
    } else {
      qmpso = qmpso_series(c, grid);
    }
  });

  const int cut = c.L / 2;
  std::ostringstream csv;
  csv << "t,epsilon,method,S_op\n";
  svg::LinePlot plot{"Operator entanglement entropy", "t", "S_op (bits)", {}, false};
  const double line = std::log2(static_cast<double>(c.chi_mps));
  plot.series.push_back({"log2 chi", {grid.front(), grid.back()}, {line, line}, true});
  svg::Series mps_series{"mps chi=" + std::to_string(c.chi_mps), {}, {}, false};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = operator_entropy(NoisyState(mps[k], 1.0).density_matrix(), c.L, cut);
    csv << num(grid[k]) << ',' << num(0.0) << ",mps," << num(s) << '\n';
    mps_series.x.push_back(grid[k]);
    mps_series.y.push_back(s);
  }
  plot.series.push_back(std::move(mps_series));
  for (double eps : c.epsilons) {
    const NoiseModel nm{eps};
    const std::string tag = " eps=" + short_num(eps);
    svg::Series st{"trotter" + tag, {}, {}, true}, sq{"qmpso" + tag, {}, {}, false};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const NoisyState rt(trotter.first[k], c.L, alpha(nm, trotter.second[k]));
      const NoisyState rq(qmpso.states[k], c.L, alpha(nm, qmpso.gates[k]));
      const double et = operator_entropy(rt.density_matrix(), c.L, cut);
      const double eq = operator_entropy(rq.density_matrix(), c.L, cut);
      csv << num(grid[k]) << ',' << num(eps) << ",trotter," << num(et) << '\n';
      csv << num(grid[k]) << ',' << num(eps) << ",qmpso," << num(eq) << '\n';
      st.x.push_back(grid[k]);
      st.y.push_back(et);
      sq.x.push_back(grid[k]);
      sq.y.push_back(eq);
    }
    plot.series.push_back(std::move(sq));
    plot.series.push_back(std::move(st));
  }
  Outputs out(c, "fig9");
  out.write("operator_entropy.csv", csv.str());
  out.write("compile.csv", compile_csv(qmpso.compiles));
  out.write("operator_entropy.svg", svg::render(plot));
  return out.finish();
}

}  // namespace

const std::vector<std::string> &experiment_names() {
  static const std::vector<std::string> names{"fig2", "fig4", "fig5", "fig6",
                                              "fig7", "fig8", "fig9"};
  return names;
}

ExperimentOutput run_experiment(std::string_view name, const RunConfig &cfg) {
  using Driver = ExperimentOutput (*)(const RunConfig &);
  static const std::map<std::string, Driver, std::less<>> drivers{
      {"fig2", fig2}, {"fig4", fig4}, {"fig5", fig5}, {"fig6", fig6},
      {"fig7", fig7}, {"fig8", fig8}, {"fig9", fig9}};
  const auto it = drivers.find(name);
  if (it == drivers.end()) {
    throw ValidationError("unknown experiment '" + std::string(name) + "'");
  }
  cfg.validate();
  return it->second(cfg);
}

}  // namespace qmpso
