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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qmpso/circuit.hpp"
#include "qmpso/compiler.hpp"
#include "qmpso/errors.hpp"
#include "qmpso/mps.hpp"
#include "qmpso/pipeline.hpp"

using namespace qmpso;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("qmpso_pipeline_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

QmpsoSchedule schedule(double t_mps, double t_mpo, int n_mps, int n_mpo, double t) {
  return {t_mps, t_mpo, n_mps, n_mpo, 0.01, t};
}

}  // namespace

TEST_CASE("schedule decomposition examples") {
  auto d = schedule(2.2, 0.2, 3, 1, 3.0).decompose();
  CHECK(d.m == 4);
  CHECK(d.delta_steps == 0);
  CHECK(d.delta_t == 0.0);

  d = schedule(2.2, 0.2, 3, 1, 2.2).decompose();
  CHECK(d.m == 0);
  CHECK(d.delta_steps == 0);

  const auto s = schedule(2.2, 0.5, 3, 1, 3.2);
  d = s.decompose();
  CHECK(d.m == 2);
  CHECK(d.delta_steps == 0);
  CHECK(s.gate_count(10) == 45);

  d = schedule(2.2, 0.5, 3, 1, 3.5).decompose();
  CHECK(d.m == 2);
  CHECK(d.delta_steps == 30);
  CHECK(d.delta_t == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(schedule(2.2, 0.5, 3, 1, 3.5).gate_count(10) == 9 * (3 + 3));
}

TEST_CASE("schedule decomposition reassembles the target time on the step grid") {
  for (int steps = 220; steps <= 600; steps += 7) {
    const auto s = schedule(2.2, 0.3, 3, 1, steps * 0.01);
    const auto d = s.decompose();
    CHECK(220 + d.m * 30 + d.delta_steps == steps);
    CHECK(d.delta_steps >= 0);
    CHECK(d.delta_steps < 30);
  }
}

TEST_CASE("schedule rejects bad input") {
  CHECK_THROWS_AS(schedule(2.2, 0.2, 3, 1, 2.0).decompose(), ValidationError);
  CHECK_THROWS_AS(schedule(2.2, 0.2, 3, 1, 3.005).decompose(), ValidationError);
  CHECK_THROWS_AS(schedule(2.2, 0.0, 3, 1, 3.0).decompose(), ValidationError);
  CHECK_THROWS_AS(schedule(2.2, 0.2, 0, 1, 3.0).decompose(), ValidationError);
}

TEST_CASE("composed circuit has the scheduled gate count and layer order") {
  const int L = 6;
  const auto qmps = StaircaseCircuit::staircase(L, 3, CircuitInit::random_unitary, 1);
  const auto qmpo = StaircaseCircuit::staircase(L, 1, CircuitInit::random_unitary, 2);
  const auto delta = StaircaseCircuit::staircase(L, 1, CircuitInit::random_unitary, 3);
  for (int steps = 220; steps <= 330; steps += 5) {
    const auto s = schedule(2.2, 0.2, 3, 1, steps * 0.01);
    const auto c = compose_qmpso(s, qmps, qmpo, &delta);
    CHECK(c.num_gates() == s.gate_count(L));
  }

  const auto s = schedule(2.2, 0.2, 3, 1, 2.7);
  const auto c = compose_qmpso(s, qmps, qmpo, &delta);
  const Matrix expected =
      delta.to_dense() * qmpo.to_dense() * qmpo.to_dense() * qmps.to_dense();
  CHECK((c.to_dense() - expected).norm() < 1e-12);

  const auto alone = compose_qmpso(schedule(2.2, 0.2, 3, 1, 2.2), qmps, qmpo);
  CHECK((alone.to_dense() - qmps.to_dense()).norm() == 0.0);
}

TEST_CASE("compose reports missing or mismatched constituents") {
  const auto qmps = StaircaseCircuit::staircase(6, 3, CircuitInit::identity);
  const auto qmpo = StaircaseCircuit::staircase(6, 1, CircuitInit::identity);
  CHECK_THROWS_AS(compose_qmpso(schedule(2.2, 0.2, 3, 1, 2.5), qmps, qmpo), ValidationError);
  CHECK_THROWS_AS(compose_qmpso(schedule(2.2, 0.2, 2, 1, 2.4), qmps, qmpo), ValidationError);
  const auto short_chain = StaircaseCircuit::staircase(5, 1, CircuitInit::identity);
  CHECK_THROWS_AS(compose_qmpso(schedule(2.2, 0.2, 3, 1, 2.4), qmps, short_chain),
                  DimensionError);

  const auto dir = scratch("compose");
  fs::create_directories(dir);
  write_circuit(dir / "qmps.json", qmps);
  write_circuit(dir / "qmpo.json", qmpo);
  const auto c = compose_qmpso(schedule(2.2, 0.2, 3, 1, 2.6), dir / "qmps.json",
                               dir / "qmpo.json");
  CHECK(c.num_gates() == 5 * (3 + 2));
  CHECK_THROWS_AS(compose_qmpso(schedule(2.2, 0.2, 3, 1, 2.6), dir / "qmps.json",
                                dir / "absent.json"),
                  IoError);
  fs::remove_all(dir);
}

TEST_CASE("QMPSO state at t_max_mps reproduces the compile report") {
  TfimParams p{8, 1.0, 1.0, 0.01};
  const double t_max = 1.0;
  const auto neel = neel_product_state(p.L);
  const auto psi0 = MatrixProductState::from_product(neel, 4);
  const auto target = tebd_evolve(psi0, p, t_max).trajectory.back();
  const auto qmps = qmps_compile(target, psi0, 2, SweepConfig::quick());
  const auto qmpo = StaircaseCircuit::staircase(p.L, 1, CircuitInit::random_unitary, 9);

  const auto c = compose_qmpso(schedule(t_max, 0.2, 2, 1, t_max), qmps.circuit, qmpo);
  const Statevector out = apply_to_state(c, product_statevector(neel));
  const double f = std::norm(target.to_statevector().dot(out));
  CHECK(std::abs(f - qmps.report.final_fidelity) < 1e-10);
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("run config round-trips through JSON and rejects unknown fields") {
  RunConfig c = RunConfig::defaults("fig7");
  c.epsilons = {0.5, 0.25};
  c.seed = 77;
  const auto back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());

  const auto partial = RunConfig::from_json(R"({"L": 8, "seed": 3})", c);
  CHECK(partial.L == 8);
  CHECK(partial.seed == 3);
  CHECK(partial.t_max_mpo == c.t_max_mpo);

  CHECK_THROWS_AS(RunConfig::from_json(R"({"chi": 8})"), ParseError);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"L": "twelve"})"), ParseError);
  CHECK_THROWS_AS(RunConfig::from_json("[1, 2]"), ParseError);
  CHECK_THROWS_AS(RunConfig::from_json("{"), ParseError);
}

TEST_CASE("config hash changes with every field") {
  using nlohmann::json;
  const RunConfig base;
  const json j = json::parse(base.to_json());
  for (const auto &[key, value] : j.items()) {
    json changed = value;
    if (value.is_number_integer() || value.is_number_unsigned()) {
      changed = value.get<long long>() + 1;
    } else if (value.is_number_float()) {
      changed = value.get<double>() * 1.5 + 0.125;
    } else if (value.is_string()) {
      changed = value.get<std::string>() + "x";
    } else if (value.is_array()) {
      changed.push_back(value.empty() ? json(1) : value.back());
    }
    const auto other = RunConfig::from_json(json{{key, changed}}.dump(), base);
    CAPTURE(key);
    CHECK(other.hash() != base.hash());
  }
  CHECK(RunConfig{}.hash() == base.hash());
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.chi_mps = 16;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = RunConfig{};
  c.n_layers_mpo = 2;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = RunConfig{};
  c.t_step = 0.015;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = RunConfig{};
  c.initial_circuit = "zeros";
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = RunConfig{};
  c.epsilons = {-1e-3};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(RunConfig::defaults("fig3"), ValidationError);
  for (const auto &name : experiment_names()) CHECK_NOTHROW(RunConfig::defaults(name).validate());
}

TEST_CASE("time grid holds exact multiples of dt") {
  RunConfig c;
  c.t_start = 0.2;
  c.t_stop = 1.0;
  c.t_step = 0.1;
  const auto g = c.time_grid();
  REQUIRE(g.size() == 9);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i] == (20 + 10 * static_cast<int>(i)) * 0.01);
  }
}

TEST_CASE("run_experiment rejects unknown names and unwritable directories") {
  RunConfig c = RunConfig::defaults("fig2");
  CHECK_THROWS_AS(run_experiment("fig3", c), ValidationError);
  const auto dir = scratch("unwritable");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  c.output_dir = (dir / "file" / "sub").string();
  c.L = 4;
  c.chis = {2};
  c.t_stop = 0.1;
  CHECK_THROWS_AS(run_experiment("fig2", c), IoError);
  fs::remove_all(dir);
}

TEST_CASE("experiments write CSV, SVG and a manifest, byte-identical on rerun") {
  RunConfig c = RunConfig::defaults("fig2");
  c.L = 6;
  c.chis = {2, 4, 8};
  c.t_stop = 1.0;
  c.threads = 2;

  const auto a = scratch("determinism_a"), b = scratch("determinism_b");
  c.output_dir = a.string();
  const auto out_a = run_experiment("fig2", c);
  c.output_dir = b.string();
  c.threads = 1;
  const auto out_b = run_experiment("fig2", c);
  REQUIRE(out_a.files.size() == out_b.files.size());
  for (std::size_t i = 0; i < out_a.files.size(); ++i) {
    CHECK(out_a.files[i].filename() == out_b.files[i].filename());
    if (out_a.files[i].extension() == ".csv") {
      CHECK(slurp(out_a.files[i]) == slurp(out_b.files[i]));
    }
  }
  const auto csv = slurp(a / "fig2_entropy.csv");
  CHECK(csv.rfind("t,cut,chi,S_vN\n", 0) == 0);
  CHECK(fs::exists(a / "fig2_entropy.svg"));

  const auto manifest = nlohmann::json::parse(slurp(out_a.manifest));
  CHECK(manifest["experiment"] == "fig2");
  CHECK(manifest["config"]["L"] == 6);
  CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(manifest["files"].size() == out_a.files.size());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("advantage experiment on a small chain") {
  RunConfig c = RunConfig::defaults("fig6");
  c.L = 6;
  c.t_max_mps = 0.5;
  c.t_max_mpo = 0.2;
  c.t_stop = 1.0;
  c.epsilons = {1e-1, 1e-3};
  c.max_sweeps_qmps = 50;
  c.max_sweeps_qmpo = 50;
  const auto dir = scratch("fig6");
  c.output_dir = dir.string();
  run_experiment("fig6", c);

  std::istringstream adv(slurp(dir / "fig6_advantage.csv"));
  std::string line;
  std::getline(adv, line);
  CHECK(line == "t,epsilon,region");
  int rows = 0;
  while (std::getline(adv, line)) {
    ++rows;
    const double t = std::stod(line.substr(0, line.find(',')));
    // chi = 8 is exact on six sites, so the MPS is never beaten.
    if (t <= 1.0) CHECK(line.substr(line.rfind(',') + 1) == "mps_best");
  }
  CHECK(rows == 11 * 2);
  std::istringstream fid(slurp(dir / "fig6_fidelity.csv"));
  std::getline(fid, line);
  CHECK(line == "t,epsilon,method,F,infidelity_per_site");
  fs::remove_all(dir);
}

TEST_CASE("experiment preconditions") {
  RunConfig c = RunConfig::defaults("fig9");
  c.L = 12;
  c.output_dir = scratch("fig9").string();
  CHECK_THROWS_AS(run_experiment("fig9", c), CapabilityError);

  c = RunConfig::defaults("fig7");
  c.L = 6;
  c.t_start = 0.05;
  c.t_step = 0.1;
  c.trotter_dt = 0.05;
  c.output_dir = scratch("fig7").string();
  CHECK_THROWS_AS(run_experiment("fig7", c), ValidationError);
}
