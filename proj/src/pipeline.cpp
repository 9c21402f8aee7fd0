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


#include "qmpso/pipeline.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qmpso/errors.hpp"

#ifndef QMPSO_VERSION
#define QMPSO_VERSION "unknown"
#endif

namespace qmpso {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    RunConfig, L, J, h, dt, chi_mps, n_layers_mps, n_layers_mpo, t_max_mps, t_max_mpo,
    trotter_dt, epsilons, t_start, t_stop, t_step, chis, layers, sizes, max_sweeps_qmps,
    max_sweeps_qmpo, convergence_delta, initial_circuit, seed, threads, output_dir,
    snapshot_every)

void QmpsoSchedule::validate() const {
  if (n_layers_mps < 1 || n_layers_mpo < 1) {
    throw ValidationError("QMPSO schedule needs at least one layer per circuit");
  }
  if (!(t_max_mpo > 0.0)) throw ValidationError("t_max_mpo must be positive");
  steps_for(t_max_mps, dt);
  steps_for(t_max_mpo, dt);
  steps_for(target_t, dt);
  if (target_t < t_max_mps - 1e-12) {
    throw ValidationError("target time precedes t_max_mps");
  }
}

QmpsoSchedule::Decomposition QmpsoSchedule::decompose() const {
  validate();
  const int rest = steps_for(target_t, dt) - steps_for(t_max_mps, dt);
  const int block = steps_for(t_max_mpo, dt);
  Decomposition d;
  d.m = rest / block;
  d.delta_steps = rest % block;
  d.delta_t = d.delta_steps * dt;
  return d;
}

std::size_t QmpsoSchedule::gate_count(int L) const {
  if (L < 2) throw ValidationError("gate count needs L >= 2");
  const auto d = decompose();
  const std::size_t blocks = static_cast<std::size_t>(d.m) + (d.delta_steps > 0 ? 1 : 0);
  return static_cast<std::size_t>(L - 1) *
         (static_cast<std::size_t>(n_layers_mps) + blocks * n_layers_mpo);
}

StaircaseCircuit compose_qmpso(const QmpsoSchedule &schedule, const StaircaseCircuit &qmps,
                               const StaircaseCircuit &qmpo,
                               const StaircaseCircuit *qmpo_delta) {
  const auto d = schedule.decompose();
  const int L = qmps.length();
  const auto check = [&](const StaircaseCircuit &c, int layers, const char *what) {
    if (c.length() != L) throw DimensionError(std::string(what) + " circuit length differs");
    if (c.num_layers() != layers) {
      throw ValidationError(std::string(what) + " circuit has " +
                            std::to_string(c.num_layers()) + " layers, schedule expects " +
                            std::to_string(layers));
    }
  };
  check(qmps, schedule.n_layers_mps, "QMPS");
  check(qmpo, schedule.n_layers_mpo, "QMPO");
  if (d.delta_steps > 0) {
    if (qmpo_delta == nullptr) {
      throw ValidationError("schedule has a remainder of " + std::to_string(d.delta_t) +
                            " but no QMPO circuit for it");
    }
    check(*qmpo_delta, schedule.n_layers_mpo, "QMPO remainder");
  }
  StaircaseCircuit out = qmps;
  for (int m = 0; m < d.m; ++m) out.append(qmpo);
  if (d.delta_steps > 0) out.append(*qmpo_delta);
  return out;
}

StaircaseCircuit compose_qmpso(const QmpsoSchedule &schedule,
                               const std::filesystem::path &qmps,
                               const std::filesystem::path &qmpo,
                               const std::filesystem::path &qmpo_delta) {
  const auto load = [](const std::filesystem::path &p) {
    if (!std::filesystem::exists(p)) {
      throw IoError("missing circuit file " + p.string());
    }
    return read_circuit(p);
  };
  const auto a = load(qmps);
  const auto b = load(qmpo);
  if (qmpo_delta.empty()) return compose_qmpso(schedule, a, b, nullptr);
  const auto c = load(qmpo_delta);
  return compose_qmpso(schedule, a, b, &c);
}

RunConfig RunConfig::defaults(std::string_view experiment) {
  RunConfig c;
  c.output_dir = "out/" + std::string(experiment);
  if (experiment == "fig2") {
    c.t_stop = 6.0;
  } else if (experiment == "fig4") {
    c.layers = {1, 2, 3};
    c.t_stop = 3.0;
    c.t_step = 0.5;
  } else if (experiment == "fig5") {
    c.layers = {1, 2};
    c.t_start = 0.1;
    c.t_stop = 0.6;
    c.t_step = 0.1;
  } else if (experiment == "fig6") {
    c.epsilons.clear();
    for (int k = 4; k <= 20; ++k) c.epsilons.push_back(std::pow(10.0, -k / 4.0));
  } else if (experiment == "fig7") {
    c.L = 10;
    c.t_max_mpo = 0.5;
    c.trotter_dt = 0.1;
    c.epsilons = {1e-2};
    c.t_stop = 5.0;
  } else if (experiment == "fig8") {
    c.layers = {1, 2};
    c.t_stop = 1.0;
    c.t_step = 0.25;
  } else if (experiment == "fig9") {
    c.L = 8;
    c.t_max_mpo = 0.5;
    c.trotter_dt = 0.1;
    c.epsilons = {1e-3};
    c.t_stop = 5.0;
  } else {
    throw ValidationError("unknown experiment '" + std::string(experiment) + "'");
  }
  return c;
}

RunConfig RunConfig::from_json(std::string_view document) {
  return from_json(document, RunConfig{});
}

RunConfig RunConfig::from_json(std::string_view document, const RunConfig &base) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  const json known = base;
  for (const auto &[key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("unknown config field '" + key + "'");
  }
  json merged = known;
  merged.update(j);
  try {
    return merged.get<RunConfig>();
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
}

RunConfig RunConfig::load(const std::filesystem::path &path, const RunConfig &base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), base);
}

void RunConfig::validate() const {
  model().validate();
  if (chi_mps < 2 || !std::has_single_bit(chi_mps) ||
      chi_mps != (std::size_t{1} << n_layers_mps)) {
    throw ValidationError("chi_mps must equal 2^n_layers_mps");
  }
  if (n_layers_mpo < 1 || (std::size_t{1} << (2 * n_layers_mpo)) > chi_mps / 2) {
    throw ValidationError("4^n_layers_mpo must not exceed chi_mps / 2");
  }
  QmpsoSchedule{t_max_mps, t_max_mpo, n_layers_mps, n_layers_mpo, dt, t_max_mps}.validate();
  if (!(trotter_dt > 0.0)) throw ValidationError("trotter_dt must be positive");
  steps_for(trotter_dt, dt);
  for (double e : epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ValidationError("epsilon must be >= 0");
  }
  if (!(t_step > 0.0) || t_stop < t_start || t_start < 0.0) {
    throw ValidationError("time grid needs 0 <= t_start <= t_stop and t_step > 0");
  }
  steps_for(t_start, dt);
  steps_for(t_step, dt);
  for (auto chi : chis) {
    if (chi < 1) throw ValidationError("bond dimensions must be positive");
  }
  for (int l : layers) {
    if (l < 1) throw ValidationError("layer counts must be positive");
  }
  for (int n : sizes) {
    if (n < 2) throw ValidationError("chain lengths must be at least 2");
  }
  if (max_sweeps_qmps < 1 || max_sweeps_qmpo < 1) {
    throw ValidationError("sweep budgets must be positive");
  }
  if (!(convergence_delta >= 0.0)) throw ValidationError("convergence_delta must be >= 0");
  if (initial_circuit != "identity" && initial_circuit != "random") {
    throw ValidationError("initial_circuit must be 'identity' or 'random'");
  }
  if (threads < 1) throw ValidationError("threads must be at least 1");
  if (snapshot_every < 0) throw ValidationError("snapshot_every must be >= 0");
}

std::string RunConfig::to_json() const { return json(*this).dump(2); }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a(json(*this).dump()); }

std::vector<double> RunConfig::time_grid() const {
  const int first = steps_for(t_start, dt);
  const int stride = steps_for(t_step, dt);
  const int last = static_cast<int>(std::floor(t_stop / dt + 1e-9));
  std::vector<double> grid;
  for (int s = first; s <= last; s += stride) grid.push_back(s * dt);
  return grid;
}

QmpsoSchedule RunConfig::schedule(double target_t) const {
  return {t_max_mps, t_max_mpo, n_layers_mps, n_layers_mpo, dt, target_t};
}

namespace {

SweepConfig sweeps(const RunConfig &c, int max_sweeps, int L, int layers) {
  SweepConfig s{max_sweeps, c.convergence_delta, std::nullopt};
  if (c.initial_circuit == "random") {
    s.warm_start = StaircaseCircuit::staircase(L, layers, CircuitInit::random_unitary, c.seed);
  }
  return s;
}

}  // namespace

SweepConfig RunConfig::qmps_sweeps(int layers) const {
  return sweeps(*this, max_sweeps_qmps, L, layers);
}

SweepConfig RunConfig::qmpo_sweeps(int layers) const {
  return sweeps(*this, max_sweeps_qmpo, L, layers);
}

std::filesystem::path write_manifest(const std::filesystem::path &dir,
                                     std::string_view prefix, const RunConfig &cfg,
                                     const std::vector<std::filesystem::path> &files) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  json m;
  m["experiment"] = prefix;
  m["config"] = cfg;
  m["config_hash"] = std::string("fnv1a64:") + hash;
  m["seed"] = cfg.seed;
  m["versions"] = {{"qmpso", QMPSO_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  json names = json::array();
  for (const auto &f : files) names.push_back(f.filename().string());
  m["files"] = names;
  const auto path = dir / (std::string(prefix) + "_manifest.json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.dump(2) << '\n';
  return path;
}

}  // namespace qmpso
