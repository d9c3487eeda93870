#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qoct/experiments.hpp"
#include "test_util.hpp"

using namespace qoct;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("qoct_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// Small-but-real sweep config: qubit state prep on a coarse grid.
ExperimentConfig small_prep() {
  ExperimentConfig c;
  c.system = "qubit";
  c.channel = "dephasing";
  c.task = "state_prep";
  c.gate = "qft";
  c.grid = TimeGrid(10.0, 300);
  c.optimizer = {0.1, 80, 1e-7};
  c.fidelity = {256, 42};
  return c;
}

}  // namespace

TEST_CASE("default gamma grid") {
  std::vector<double> g = default_gamma_grid();
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(0.01).epsilon(1e-12));
  for (size_t k = 1; k < g.size(); ++k)
    CHECK(g[k] - g[k - 1] == doctest::Approx(0.005).epsilon(1e-10));
}

TEST_CASE("config JSON round-trip preserves every field") {
  ExperimentConfig c;
  c.system = "qutrit";
  c.channel = "amp_damping";
  c.gamma_list = {0.0, 0.03, 0.1};
  c.gate = "u2";
  c.task = "gate";
  c.state_set = "basis_plus_superposition";
  c.trial = {"resonant", 2};
  c.grid = TimeGrid(10.0, 500);
  c.optimizer = {0.25, 123, 1e-6};
  c.fidelity = {4096, 777};
  c.measure = "mc_mean";
  c.h1_source = "gate";
  c.warm_start = true;
  c.A0 = 0.02;
  c.t_r_fraction = 0.05;
  c.output = "out.csv";

  ExperimentConfig r = config_from_json(config_to_json(c));
  CHECK(r.system == c.system);
  CHECK(r.channel == c.channel);
  CHECK(r.gamma_list == c.gamma_list);
  CHECK(r.gate == c.gate);
  CHECK(r.task == c.task);
  CHECK(r.state_set == c.state_set);
  CHECK(r.trial.type == "resonant");
  CHECK(r.trial.level == 2);
  CHECK(r.grid == c.grid);
  CHECK(r.optimizer.lambda == c.optimizer.lambda);
  CHECK(r.optimizer.max_iters == c.optimizer.max_iters);
  CHECK(r.optimizer.tol == c.optimizer.tol);
  CHECK(r.fidelity.Ns == c.fidelity.Ns);
  CHECK(r.fidelity.seed == c.fidelity.seed);
  CHECK(r.measure == c.measure);
  CHECK(r.h1_source == c.h1_source);
  CHECK(r.warm_start == c.warm_start);
  CHECK(r.A0 == c.A0);
  CHECK(r.t_r_fraction == c.t_r_fraction);
  CHECK(r.output == c.output);
}

TEST_CASE("config parsing is strict about keys, types, and ranges") {
  CHECK_NOTHROW(config_from_json("{}"));
  CHECK_THROWS_AS(config_from_json("{\"sytem\": \"qubit\"}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"lambda\": 0.1}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"system\": 3}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"trial\": {\"freq\": 1}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"trial\": {\"type\": \"sine\"}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"grid\": {\"N\": 1}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"grid\": {\"N\": 2.5}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"optimizer\": {\"lambda\": 0}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"optimizer\": {\"step\": 1}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"fidelity\": {\"Ns\": 0}}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"measure\": \"typo\"}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"h1_source\": \"matrix\"}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"gamma_list\": [0.1, -0.2]}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"t_r_fraction\": 0.6}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("resolve wires the catalogs together") {
  ExperimentConfig c = small_prep();

  ResolvedExperiment prep = resolve(c, 0.05);
  CHECK(prep.measure == "state");
  REQUIRE(prep.problem.states.size() == 1);
  CHECK(prep.problem.states[0].rho0(0, 0) == Complex(1.0, 0.0));   // |0><0|
  CHECK(prep.problem.states[0].weight == 1.0);
  CHECK(prep.problem.channel.terms.size() == 1);
  CHECK(prep.problem.channel.terms[0].gamma == 0.05);
  CHECK(prep.problem.lambda == c.optimizer.lambda);
  CHECK_NOTHROW(prep.problem.validate());

  c.task = "gate";
  ResolvedExperiment gate = resolve(c, 0.0);
  CHECK(gate.measure == "mc_mean");
  CHECK(gate.problem.states.size() == 3);   // basis + superposition for the qubit
  CHECK(gate.problem.channel.empty() == false);   // rate-0 terms still present
  CHECK(gate.fidelity_levels == std::vector<int>{0, 1});

  c.measure = "set_mean";
  CHECK(resolve(c, 0.0).measure == "set_mean");

  CHECK_THROWS_AS([&] {
    ExperimentConfig bad = small_prep();
    bad.task = "teleport";
    resolve(bad, 0.0);
  }(), std::invalid_argument);
}

TEST_CASE("resolve picks the drive operator per h1_source") {
  ExperimentConfig c;
  c.system = "qutrit";
  c.channel = "dephasing";
  c.task = "gate";
  c.gate = "u2";
  c.grid = TimeGrid(10.0, 200);

  // auto: qutrit u-gates take the coupling from the gate's nonzero pattern
  ResolvedExperiment r = resolve(c, 0.0);
  CHECK(!r.h1_flagged);
  CHECK(r.problem.H1(0, 1) == Complex(0.0, 0.0));
  CHECK(r.problem.H1(0, 2) == Complex(1.0, 0.0));

  // u4 is diagonal: the pattern commutes with H0, so auto falls back and flags
  c.gate = "u4";
  ResolvedExperiment f = resolve(c, 0.0);
  CHECK(f.h1_flagged);
  CHECK((f.problem.H1 - build_qutrit().H1).cwiseAbs().maxCoeff() == 0.0);

  c.h1_source = "gate";
  CHECK_THROWS_AS(resolve(c, 0.0), std::invalid_argument);

  c.h1_source = "system";
  c.gate = "u2";
  ResolvedExperiment s = resolve(c, 0.0);
  CHECK(!s.h1_flagged);
  CHECK((s.problem.H1 - build_qutrit().H1).cwiseAbs().maxCoeff() == 0.0);

  // the qft gate never uses the pattern rule
  c.h1_source = "auto";
  c.gate = "qft";
  CHECK((resolve(c, 0.0).problem.H1 - build_qutrit().H1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resolve builds plain and resonant trials") {
  ExperimentConfig c = small_prep();
  ResolvedExperiment plain = resolve(c, 0.0);
  ControlField expect = trial_field(c.grid, c.A0, c.grid.T * c.t_r_fraction);
  CHECK(plain.problem.trial.samples == expect.samples);
  CHECK(plain.problem.trial.envelope == expect.envelope);

  c.trial = {"resonant", 1};
  ResolvedExperiment res = resolve(c, 0.0);
  ControlField expect_r =
      resonant_trial(c.grid, c.A0, c.grid.T * c.t_r_fraction, 2.0);   // omega_10 = 2
  CHECK(res.problem.trial.samples == expect_r.samples);

  c.trial = {"resonant", 5};
  CHECK_THROWS_AS(resolve(c, 0.0), std::invalid_argument);
}

TEST_CASE("evaluate_measure matches a hand-built propagation") {
  ExperimentConfig c = small_prep();
  ResolvedExperiment r = resolve(c, 0.04);
  ControlField field = test::random_field(99, c.grid, 0.2);

  Measurement m = evaluate_measure(r, field, c.fidelity);
  Trajectory traj = propagate_forward(r.problem.states[0].rho0, field, r.problem.H0,
                                      r.problem.H1, r.problem.channel);
  Vector e0 = Vector::Zero(2);
  e0(0) = 1.0;
  CHECK(m.F == doctest::Approx(state_fidelity(traj.states.back(), r.gate.O, e0)).epsilon(1e-13));
  CHECK(m.std_error == 0.0);
}

TEST_CASE("run_sweep orders gammas and reuses the unitary run at gamma zero") {
  ExperimentConfig c = small_prep();
  c.gamma_list = {0.05, 0.0};   // deliberately unsorted
  std::vector<SweepRecord> recs = run_sweep(c);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].gamma == 0.0);
  CHECK(recs[1].gamma == 0.05);

  // at gamma = 0 the two columns are the same run
  CHECK(recs[0].F_unitary == recs[0].F_nonunitary);
  CHECK(recs[0].stderr_u == recs[0].stderr_n);

  // state prep under noise: re-optimization cannot lose
  CHECK(recs[1].F_nonunitary >= recs[1].F_unitary - 1e-6);

  for (const auto& rec : recs) {
    CHECK(rec.task == "state_prep");
    CHECK(rec.system == "qubit");
    CHECK(rec.channel == "dephasing");
    CHECK(rec.gate == "qft");
    CHECK(rec.trial == "plain");
    CHECK(rec.seed == 42);
    CHECK(rec.iters_n >= 1);
  }
}

TEST_CASE("sweep CSV uses the fixed schema") {
  TempDir dir;
  SweepRecord rec;
  rec.gamma = 0.015;
  rec.task = "gate";
  rec.system = "qutrit";
  rec.channel = "amp_damping";
  rec.gate = "qft";
  rec.trial = "resonant_2";
  rec.F_unitary = 0.91234567890123456;
  rec.F_nonunitary = 0.95;
  rec.stderr_u = 1e-4;
  rec.stderr_n = 2e-4;
  rec.iters_n = 321;
  rec.J_final_n = 0.0625;
  rec.seed = 42;

  std::string path = dir.file("s.csv");
  write_sweep_csv(path, {rec});
  std::string text = slurp(path);
  std::istringstream lines(text);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header ==
        "gamma,task,system,channel,gate,trial,F_unitary,F_nonunitary,stderr_u,stderr_n,"
        "iters_n,J_final_n,seed");
  CHECK(row.find("0.014999999999999999,gate,qutrit,amp_damping,qft,resonant_2,") == 0);
  CHECK(row.find(",321,") != std::string::npos);
  CHECK(row.substr(row.size() - 3) == ",42");
  // count columns
  CHECK(std::count(row.begin(), row.end(), ',') == 12);
}

TEST_CASE("pulse files round-trip bit-exactly and replay consistently") {
  TempDir dir;
  ExperimentConfig c = small_prep();
  c.optimizer.max_iters = 60;
  ResolvedExperiment r = resolve(c, 0.02);
  KrotovResult opt = optimize(r.problem, c.optimizer.max_iters, c.optimizer.tol);
  Measurement m = evaluate_measure(r, opt.field, c.fidelity);

  PulseMetadata meta;
  meta.config = c;
  meta.gamma = 0.02;
  meta.iterations = opt.iterations;
  meta.converged = opt.converged;
  meta.J_T = opt.JT_history.back();
  meta.F = m.F;
  meta.std_error = m.std_error;

  std::string path = dir.file("pulse.json");
  save_pulse(path, opt.field, meta);

  LoadedPulse back = load_pulse(path);
  CHECK(back.field.samples == opt.field.samples);       // bit-exact through %.17g
  CHECK(back.field.envelope == opt.field.envelope);
  CHECK(back.field.reference == opt.field.reference);
  CHECK(back.field.grid == opt.field.grid);
  CHECK(back.meta.gamma == meta.gamma);
  CHECK(back.meta.J_T == meta.J_T);
  CHECK(back.meta.config.system == "qubit");
  CHECK(back.meta.config.optimizer.max_iters == 60);

  ReplayReport rep = replay(path);
  CHECK(rep.consistent);
  CHECK(rep.J_T == doctest::Approx(meta.J_T).epsilon(1e-14));
  CHECK(rep.F == doctest::Approx(meta.F).epsilon(1e-14));

  // sabotage one sample: replay must notice
  ControlField bad = opt.field;
  bad.samples[7] += 1e-3;
  std::string bad_path = dir.file("bad.json");
  save_pulse(bad_path, bad, meta);
  CHECK(!replay(bad_path).consistent);
}

TEST_CASE("load_pulse rejects malformed files") {
  TempDir dir;
  std::string path = dir.file("p.json");

  ExperimentConfig c = small_prep();
  c.grid = TimeGrid(10.0, 50);
  ControlField f = test::random_field(5, c.grid);
  PulseMetadata meta;
  meta.config = c;
  save_pulse(path, f, meta);
  CHECK_NOTHROW(load_pulse(path));

  // truncate the samples array
  std::string text = slurp(path);
  size_t pos = text.find("\"samples\"");
  REQUIRE(pos != std::string::npos);
  size_t first_nl = text.find('\n', text.find('[', pos));
  size_t second_nl = text.find('\n', first_nl + 1);
  std::string cut = text.substr(0, first_nl) + text.substr(second_nl);
  std::ofstream(path) << cut;
  CHECK_THROWS_AS(load_pulse(path), std::invalid_argument);

  CHECK_THROWS_AS(load_pulse(dir.file("missing.json")), std::runtime_error);

  std::ofstream(dir.file("junk.json")) << "{\"pulse\": 1}";
  CHECK_THROWS_AS(load_pulse(dir.file("junk.json")), std::invalid_argument);
}
