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


#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qmpso/circuit.hpp"
#include "qmpso/compiler.hpp"
#include "qmpso/errors.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/noise.hpp"
#include "qmpso/pipeline.hpp"
#include "qmpso/reference.hpp"

namespace fs = std::filesystem;
using namespace qmpso;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

RunConfig resolve(const Globals &g, RunConfig base) {
  RunConfig c = g.config.empty() ? base : RunConfig::load(g.config, base);
  if (!g.out.empty()) c.output_dir = g.out;
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  c.validate();
  fs::create_directories(c.output_dir);
  return c;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content)) throw IoError("cannot write " + p.string());
  std::cout << p.string() << '\n';
}

MatrixProductState tebd_target(const RunConfig &c, double t) {
  const auto psi0 = MatrixProductState::from_product(neel_product_state(c.L), c.chi_mps);
  TebdOptions opt;
  opt.snapshot_every = 0;
  return tebd_evolve(psi0, c.model(), t, opt).trajectory.back();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"QMPS/QMPO/QMPSO circuits for Ising quench dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for random initial circuits");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto *tebd = app.add_subcommand("tebd", "Truncated TEBD entropy trace of the Neel quench");
  std::optional<std::size_t> chi;
  tebd->add_option("--chi", chi, "Bond dimension (default chi_mps)");

  auto *cq = app.add_subcommand("compile-qmps", "Compile a QMPS circuit for the TEBD state at t");
  auto *co = app.add_subcommand("compile-qmpo", "Compile a QMPO circuit for the propagator at t");
  std::optional<double> t_opt;
  std::optional<int> layers;
  for (auto *sub : {cq, co}) {
    sub->add_option("--t", t_opt, "Target time");
    sub->add_option("--layers", layers, "Number of staircase layers");
  }

  auto *compose = app.add_subcommand("compose", "Concatenate QMPS and QMPO circuits for time t");
  std::string qmps_path, qmpo_path, delta_path;
  double t_target = 0.0;
  compose->add_option("--t", t_target, "Target time")->required();
  compose->add_option("--qmps", qmps_path, "QMPS circuit at t_max_mps")->required();
  compose->add_option("--qmpo", qmpo_path, "QMPO circuit at t_max_mpo")->required();
  compose->add_option("--qmpo-delta", delta_path, "QMPO circuit for the remainder");

  auto *noisy = app.add_subcommand("simulate-noisy",
                                   "Noisy fidelity and magnetization of a circuit at t");
  std::string circuit_path;
  double t_noisy = 0.0;
  noisy->add_option("--circuit", circuit_path, "Circuit JSON")->required()->check(CLI::ExistingFile);
  noisy->add_option("--t", t_noisy, "Time of the reference state")->required();

  auto *advantage = app.add_subcommand("advantage", "Advantage diagram over time and error rate");
  auto *exact = app.add_subcommand("exact", "Exact and reference magnetizations on the time grid");

  auto *experiment = app.add_subcommand("experiment", "Reproduce one figure");
  std::string name;
  experiment->add_option("name", name, "fig2, fig4, fig5, fig6, fig7, fig8 or fig9")
      ->required()
      ->check(CLI::IsMember(experiment_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*experiment) {
      const auto c = resolve(g, RunConfig::defaults(name));
      const auto out = run_experiment(name, c);
      for (const auto &f : out.files) std::cout << f.string() << '\n';
      std::cout << out.manifest.string() << '\n';
    } else if (*advantage) {
      const auto c = resolve(g, RunConfig::defaults("fig6"));
      const auto out = run_experiment("fig6", c);
      for (const auto &f : out.files) std::cout << f.string() << '\n';
    } else if (*tebd) {
      const auto c = resolve(g, RunConfig::defaults("fig2"));
      const std::size_t bond = chi.value_or(c.chi_mps);
      const auto psi0 = MatrixProductState::from_product(neel_product_state(c.L), bond);
      TebdOptions opt;
      opt.snapshot_every = c.snapshot_every;
      const auto r = tebd_evolve(psi0, c.model(), c.time_grid().back(), opt);
      std::ostringstream csv;
      r.entropy.write_csv(csv, bond);
      write_file(fs::path(c.output_dir) / "tebd_entropy.csv", csv.str());
      std::cout << "t_max " << t_max_detect(r.entropy, bond) << "\n";
    } else if (*cq) {
      const auto c = resolve(g, RunConfig{});
      const double t = t_opt.value_or(c.t_max_mps);
      const int l = layers.value_or(c.n_layers_mps);
      const auto target = tebd_target(c, t);
      const auto psi0 = MatrixProductState::from_product(neel_product_state(c.L));
      const auto r = qmps_compile(target, psi0, l, c.qmps_sweeps(l));
      const fs::path dir = c.output_dir;
      write_circuit(dir / "qmps.json", r.circuit);
      std::cout << (dir / "qmps.json").string() << '\n';
      write_file(dir / "qmps_report.json", r.report.to_json());
    } else if (*co) {
      const auto c = resolve(g, RunConfig{});
      const double t = t_opt.value_or(c.t_max_mpo);
      const int l = layers.value_or(c.n_layers_mpo);
      const auto r = qmpo_compile(c.model(), t, l, c.qmpo_sweeps(l));
      const fs::path dir = c.output_dir;
      write_circuit(dir / "qmpo.json", r.circuit);
      std::cout << (dir / "qmpo.json").string() << '\n';
      write_file(dir / "qmpo_report.json", r.report.to_json());
    } else if (*compose) {
      const auto c = resolve(g, RunConfig{});
      const auto s = c.schedule(t_target);
      const auto circuit = compose_qmpso(s, qmps_path, qmpo_path, delta_path);
      const fs::path path = fs::path(c.output_dir) / "qmpso.json";
      write_circuit(path, circuit);
      const auto d = s.decompose();
      std::cout << path.string() << "\nM " << d.m << " delta_t " << d.delta_t << " gates "
                << circuit.num_gates() << '\n';
    } else if (*noisy) {
      const auto c = resolve(g, RunConfig{});
      const auto circuit = read_circuit(circuit_path);
      if (circuit.length() != c.L) throw DimensionError("circuit length differs from L");
      const Statevector psi =
          apply_to_state(circuit, product_statevector(neel_product_state(c.L)));
      const Statevector ref = fine_trotter_reference(c.model(), t_noisy);
      std::ostringstream fid, mag;
      fid << "t,epsilon,method,F,infidelity_per_site\n";
      mag << "t,site,method,z\n";
      for (double eps : c.epsilons) {
        const NoisyState rho(psi, c.L, alpha(NoiseModel{eps}, circuit.num_gates()));
        const double f = noisy_fidelity(rho, ref);
        fid << num(t_noisy) << ',' << num(eps) << ",circuit," << num(f) << ','
            << num(infidelity_per_site(f, c.L)) << '\n';
        for (int i = 0; i < c.L; ++i) {
          mag << num(t_noisy) << ',' << i << ",circuit_eps=" << eps << ','
              << num(noisy_expectation_z(rho, i)) << '\n';
        }
      }
      write_file(fs::path(c.output_dir) / "noisy_fidelity.csv", fid.str());
      write_file(fs::path(c.output_dir) / "noisy_magnetization.csv", mag.str());
    } else if (*exact) {
      const auto c = resolve(g, RunConfig::defaults("fig7"));
      const auto grid = c.time_grid();
      const auto H = DenseHamiltonian::tfim(c.model());
      const Statevector neel = product_statevector(neel_product_state(c.L));
      const auto ref = fine_trotter_series(c.model(), grid);
      std::ostringstream mag;
      mag << "t,site,method,z\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto ze = local_magnetization(exact_propagate(neel, H, grid[k]));
        const auto zr = local_magnetization(ref[k]);
        for (int i = 0; i < c.L; ++i) {
          mag << num(grid[k]) << ',' << i << ",exact," << num(ze[i]) << '\n';
          mag << num(grid[k]) << ',' << i << ",reference," << num(zr[i]) << '\n';
        }
      }
      write_file(fs::path(c.output_dir) / "exact_magnetization.csv", mag.str());
    }
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
