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
 * End-to-end drivers: the QMPSO time decomposition, run configuration, and
 * the experiments that write CSV tables, SVG renderings and a manifest.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qmpso/circuit.hpp"
#include "qmpso/compiler.hpp"
#include "qmpso/tfim.hpp"

namespace qmpso {

/// t = t_max_mps + M t_max_mpo + delta_t on the dt grid.
struct QmpsoSchedule {
  double t_max_mps = 2.2;
  double t_max_mpo = 0.2;
  int n_layers_mps = 3;
  int n_layers_mpo = 1;
  double dt = 0.01;
  double target_t = 2.2;

  struct Decomposition {
    int m = 0;
    int delta_steps = 0;
    double delta_t = 0.0;
  };

  void validate() const;
  /// M = floor((target_t - t_max_mps) / t_max_mpo) and the remainder, both
  /// computed in integer dt steps.
  Decomposition decompose() const;
  /// (L - 1)(N_mps + (M + [delta_t > 0]) N_mpo).
  std::size_t gate_count(int L) const;
};

/// U_QMPO(delta_t) U_QMPO(t_max_mpo)^M U_QMPS as one staircase circuit.
/// qmpo_delta may be null only when the decomposition has no remainder.
StaircaseCircuit compose_qmpso(const QmpsoSchedule &schedule, const StaircaseCircuit &qmps,
                               const StaircaseCircuit &qmpo,
                               const StaircaseCircuit *qmpo_delta = nullptr);

/// Reads the constituent circuit files; an empty delta path means none.
StaircaseCircuit compose_qmpso(const QmpsoSchedule &schedule,
                               const std::filesystem::path &qmps,
                               const std::filesystem::path &qmpo,
                               const std::filesystem::path &qmpo_delta = {});

struct RunConfig {
  int L = 12;
  double J = 1.0;
  double h = 1.0;
  /// Step of the reference evolution, the TEBD and the compile targets.
  double dt = 0.01;

  std::size_t chi_mps = 8;
  int n_layers_mps = 3;
  int n_layers_mpo = 1;
  double t_max_mps = 2.2;
  double t_max_mpo = 0.2;
  /// Step of the noisy Trotter circuit compared against QMPSO.
  double trotter_dt = 0.01;

  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  double t_start = 0.0;
  double t_stop = 6.0;
  double t_step = 0.1;

  /// Bond dimensions (fig2), layer counts (fig4, fig5, fig8), chain lengths
  /// (fig8).
  std::vector<std::size_t> chis{2, 4, 8, 16, 32, 64};
  std::vector<int> layers{1, 2, 3};
  std::vector<int> sizes{8, 10, 12};

  int max_sweeps_qmps = 2000;
  int max_sweeps_qmpo = 1000;
  double convergence_delta = 1e-8;
  /// "identity" or "random"; random first circuits are drawn from `seed`.
  std::string initial_circuit = "identity";

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output_dir = "out";
  int snapshot_every = 10;

  /// Defaults of a named experiment.
  static RunConfig defaults(std::string_view experiment);
  /// Overrides the fields present in a JSON object; unknown keys are
  /// rejected.
  static RunConfig from_json(std::string_view document, const RunConfig &base);
  static RunConfig from_json(std::string_view document);
  static RunConfig load(const std::filesystem::path &path, const RunConfig &base);

  /// Field ranges, grid alignment with dt, chi_mps = 2^n_layers_mps and
  /// 4^n_layers_mpo <= chi_mps / 2.
  void validate() const;
  std::string to_json() const;
  /// FNV-1a 64 of the canonical JSON of every field.
  std::uint64_t hash() const;

  TfimParams model() const { return {L, J, h, dt}; }
  /// t_start, t_start + t_step, ... up to t_stop, as exact multiples of dt.
  std::vector<double> time_grid() const;
  QmpsoSchedule schedule(double target_t) const;
  /// Sweep budgets for a circuit of `layers` layers on this chain; random
  /// initial circuits are seeded from `seed`.
  SweepConfig qmps_sweeps(int layers) const;
  SweepConfig qmpo_sweeps(int layers) const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

const std::vector<std::string> &experiment_names();

/// Runs fig2, fig4, fig5, fig6, fig7, fig8 or fig9 into cfg.output_dir.
ExperimentOutput run_experiment(std::string_view name, const RunConfig &cfg);

/// Writes <prefix>_manifest.json with the config, its hash, versions and the
/// list of output files.
std::filesystem::path write_manifest(const std::filesystem::path &dir,
                                     std::string_view prefix, const RunConfig &cfg,
                                     const std::vector<std::filesystem::path> &files);

}  // namespace qmpso
