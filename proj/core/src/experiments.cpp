#include "qoct/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

namespace qoct {
namespace {

using ojson = nlohmann::ordered_json;

void check_keys(const ojson& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) throw std::invalid_argument("unknown key \"" + item.key() + "\" in " + where);
  }
}

double require_num(const ojson& j, const std::string& where) {
  if (!j.is_number()) throw std::invalid_argument(where + " must be a number");
  return j.get<double>();
}

long long require_int(const ojson& j, const std::string& where) {
  if (!j.is_number_integer()) throw std::invalid_argument(where + " must be an integer");
  return j.get<long long>();
}

std::string require_str(const ojson& j, const std::string& where) {
  if (!j.is_string()) throw std::invalid_argument(where + " must be a string");
  return j.get<std::string>();
}

bool require_bool(const ojson& j, const std::string& where) {
  if (!j.is_boolean()) throw std::invalid_argument(where + " must be a boolean");
  return j.get<bool>();
}

TrialSpec trial_from_tree(const ojson& j) {
  check_keys(j, "trial", {"type", "level"});
  TrialSpec t;
  if (j.contains("type")) t.type = require_str(j.at("type"), "trial.type");
  if (j.contains("level")) t.level = static_cast<int>(require_int(j.at("level"), "trial.level"));
  if (t.type != "plain" && t.type != "resonant")
    throw std::invalid_argument("trial.type must be \"plain\" or \"resonant\"");
  if (t.level < 1) throw std::invalid_argument("trial.level must be >= 1");
  return t;
}

TimeGrid grid_from_tree(const ojson& j) {
  check_keys(j, "grid", {"T", "N"});
  TimeGrid d;
  double T = j.contains("T") ? require_num(j.at("T"), "grid.T") : d.T;
  int N = j.contains("N") ? static_cast<int>(require_int(j.at("N"), "grid.N")) : d.N;
  return TimeGrid(T, N);
}

OptimizerSpec optimizer_from_tree(const ojson& j) {
  check_keys(j, "optimizer", {"lambda", "max_iters", "tol"});
  OptimizerSpec o;
  if (j.contains("lambda")) o.lambda = require_num(j.at("lambda"), "optimizer.lambda");
  if (j.contains("max_iters"))
    o.max_iters = static_cast<int>(require_int(j.at("max_iters"), "optimizer.max_iters"));
  if (j.contains("tol")) o.tol = require_num(j.at("tol"), "optimizer.tol");
  if (!(o.lambda > 0.0)) throw std::invalid_argument("optimizer.lambda must be > 0");
  if (o.max_iters < 1) throw std::invalid_argument("optimizer.max_iters must be >= 1");
  if (!(o.tol >= 0.0)) throw std::invalid_argument("optimizer.tol must be >= 0");
  return o;
}

FidelitySpec fidelity_from_tree(const ojson& j) {
  check_keys(j, "fidelity", {"Ns", "seed"});
  FidelitySpec f;
  if (j.contains("Ns")) f.Ns = static_cast<int>(require_int(j.at("Ns"), "fidelity.Ns"));
  if (j.contains("seed")) {
    const ojson& s = j.at("seed");
    if (!s.is_number_integer()) throw std::invalid_argument("fidelity.seed must be an integer");
    f.seed = s.get<std::uint64_t>();
  }
  if (f.Ns < 1) throw std::invalid_argument("fidelity.Ns must be >= 1");
  return f;
}

ExperimentConfig config_from_tree(const ojson& j) {
  check_keys(j, "config",
             {"system", "channel", "gamma_list", "gate", "task", "state_set", "trial", "grid",
              "optimizer", "fidelity", "measure", "h1_source", "warm_start", "A0",
              "t_r_fraction", "output"});
  ExperimentConfig c;
  if (j.contains("system")) c.system = require_str(j.at("system"), "system");
  if (j.contains("channel")) c.channel = require_str(j.at("channel"), "channel");
  if (j.contains("gamma_list")) {
    const ojson& a = j.at("gamma_list");
    if (!a.is_array()) throw std::invalid_argument("gamma_list must be an array");
    c.gamma_list.clear();
    for (const auto& x : a) {
      double g = require_num(x, "gamma_list entry");
      if (!(g >= 0.0)) throw std::invalid_argument("gamma_list entries must be >= 0");
      c.gamma_list.push_back(g);
    }
  }
  if (j.contains("gate")) c.gate = require_str(j.at("gate"), "gate");
  if (j.contains("task")) c.task = require_str(j.at("task"), "task");
  if (c.task != "state_prep" && c.task != "gate")
    throw std::invalid_argument("task must be \"state_prep\" or \"gate\"");
  if (j.contains("state_set")) c.state_set = require_str(j.at("state_set"), "state_set");
  if (j.contains("trial")) c.trial = trial_from_tree(j.at("trial"));
  if (j.contains("grid")) c.grid = grid_from_tree(j.at("grid"));
  if (j.contains("optimizer")) c.optimizer = optimizer_from_tree(j.at("optimizer"));
  if (j.contains("fidelity")) c.fidelity = fidelity_from_tree(j.at("fidelity"));
  if (j.contains("measure")) c.measure = require_str(j.at("measure"), "measure");
  if (c.measure != "auto" && c.measure != "state" && c.measure != "set_mean" &&
      c.measure != "mc_mean")
    throw std::invalid_argument("measure must be auto, state, set_mean, or mc_mean");
  if (j.contains("h1_source")) c.h1_source = require_str(j.at("h1_source"), "h1_source");
  if (c.h1_source != "auto" && c.h1_source != "system" && c.h1_source != "gate")
    throw std::invalid_argument("h1_source must be auto, system, or gate");
  if (j.contains("warm_start")) c.warm_start = require_bool(j.at("warm_start"), "warm_start");
  if (j.contains("A0")) c.A0 = require_num(j.at("A0"), "A0");
  if (!std::isfinite(c.A0)) throw std::invalid_argument("A0 must be finite");
  if (j.contains("t_r_fraction")) c.t_r_fraction = require_num(j.at("t_r_fraction"), "t_r_fraction");
  if (!(c.t_r_fraction > 0.0 && c.t_r_fraction <= 0.5))
    throw std::invalid_argument("t_r_fraction must lie in (0, 0.5]");
  if (j.contains("output")) c.output = require_str(j.at("output"), "output");
  return c;
}

ojson config_tree(const ExperimentConfig& c) {
  ojson j;
  j["system"] = c.system;
  j["channel"] = c.channel;
  j["gamma_list"] = c.gamma_list;
  j["gate"] = c.gate;
  j["task"] = c.task;
  j["state_set"] = c.state_set;
  j["trial"] = ojson{{"type", c.trial.type}, {"level", c.trial.level}};
  j["grid"] = ojson{{"T", c.grid.T}, {"N", c.grid.N}};
  j["optimizer"] = ojson{{"lambda", c.optimizer.lambda},
                         {"max_iters", c.optimizer.max_iters},
                         {"tol", c.optimizer.tol}};
  j["fidelity"] = ojson{{"Ns", c.fidelity.Ns}, {"seed", c.fidelity.seed}};
  j["measure"] = c.measure;
  j["h1_source"] = c.h1_source;
  j["warm_start"] = c.warm_start;
  j["A0"] = c.A0;
  j["t_r_fraction"] = c.t_r_fraction;
  j["output"] = c.output;
  return j;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trial_label(const TrialSpec& t) {
  if (t.type == "plain") return "plain";
  return "resonant_" + std::to_string(t.level);
}

void write_sample_array(std::ofstream& out, const char* name, const std::vector<double>& v) {
  out << ",\n  \"" << name << "\": [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << (i == 0 ? "\n    " : ",\n    ") << fmt17(v[i]);
  }
  out << "\n  ]";
}

}  // namespace

std::vector<double> default_gamma_grid() {
  std::vector<double> g(21);
  for (int i = 0; i < 21; ++i) g[i] = 0.1 * i / 20.0;
  return g;
}

namespace {

ojson parse_or_invalid(const std::string& text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  return config_from_tree(parse_or_invalid(text, "config"));
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file \"" + path + "\"");
  return config_from_tree(parse_or_invalid(std::string(std::istreambuf_iterator<char>(in), {}),
                                           "config file \"" + path + "\""));
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_tree(config).dump(2) + "\n";
}

ResolvedExperiment resolve(const ExperimentConfig& config, double gamma) {
  if (config.task != "state_prep" && config.task != "gate")
    throw std::invalid_argument("task must be \"state_prep\" or \"gate\"");
  ResolvedExperiment res;
  res.sys = system_catalog(config.system);
  res.gate = gate_catalog(config.gate, res.sys);

  res.measure = config.measure;
  if (res.measure == "auto") res.measure = config.task == "state_prep" ? "state" : "mc_mean";

  bool from_gate = config.h1_source == "gate";
  if (config.h1_source == "auto")
    from_gate = res.sys.name == "qutrit" && res.gate.name.size() == 2 && res.gate.name[0] == 'u';

  ControlProblem p;
  p.H0 = res.sys.H0;
  p.H1 = res.sys.H1;
  if (from_gate) {
    Matrix B = coupling_from_gate(res.gate.O);
    // A pattern that commutes with the drift (diagonal gates give B = I) cannot
    // drive any transition, so it is useless as a coupling.
    Matrix comm = B * p.H0 - p.H0 * B;
    if (comm.cwiseAbs().maxCoeff() > 1e-12) {
      p.H1 = B;
    } else if (config.h1_source == "gate") {
      throw std::invalid_argument("gate \"" + res.gate.name +
                                  "\" has a coupling pattern that commutes with the drift");
    } else {
      res.h1_flagged = true;   // keep the system coupling
    }
  }

  p.channel = channel_catalog(config.channel, gamma, res.sys);
  p.target = res.gate.O;
  p.grid = config.grid;
  p.lambda = config.optimizer.lambda;

  if (config.task == "state_prep") {
    Matrix rho0 = Matrix::Zero(res.sys.dim, res.sys.dim);
    rho0(0, 0) = 1.0;
    p.states = {WeightedState{rho0, 1.0}};
  } else {
    p.states = state_set_catalog(config.state_set, res.sys).states;
  }

  double t_r = config.t_r_fraction * config.grid.T;
  if (config.trial.type == "plain") {
    p.trial = trial_field(config.grid, config.A0, t_r);
  } else {
    p.trial = resonant_trial(config.grid, config.A0, t_r,
                             bohr_frequency(res.sys, config.trial.level));
  }

  p.validate();
  res.problem = std::move(p);
  res.fidelity_levels = res.sys.computational_levels;
  return res;
}

Measurement evaluate_measure(const ResolvedExperiment& res, const ControlField& field,
                             const FidelitySpec& fid, int threads) {
  const ControlProblem& p = res.problem;
  if (res.measure == "mc_mean") {
    MonteCarloResult mc =
        mean_gate_fidelity(p, field, res.fidelity_levels, fid.Ns, fid.seed, threads);
    return {mc.estimate, mc.std_error};
  }
  std::vector<Matrix> mats = step_matrices(field, p.H0, p.H1, p.channel);
  if (res.measure == "state") {
    Matrix rhoT = propagate_forward_with(mats, p.states.at(0).rho0).states.back();
    Vector psi0 = Vector::Zero(p.H0.rows());
    psi0(0) = 1.0;
    return {state_fidelity(rhoT, p.target, psi0), 0.0};
  }
  if (res.measure != "set_mean") throw std::invalid_argument("unknown measure \"" + res.measure + "\"");
  std::vector<Matrix> finals, targets;
  finals.reserve(p.states.size());
  targets.reserve(p.states.size());
  for (const auto& ws : p.states) {
    finals.push_back(propagate_forward_with(mats, ws.rho0).states.back());
    targets.push_back(p.target * ws.rho0 * dag(p.target));
  }
  return {mean_fidelity_states(finals, targets), 0.0};
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, int threads) {
  std::vector<double> gammas = config.gamma_list.empty() ? default_gamma_grid() : config.gamma_list;
  std::sort(gammas.begin(), gammas.end());
  if (threads < 1) threads = 1;

  ResolvedExperiment res0 = resolve(config, 0.0);
  KrotovResult unitary = optimize(res0.problem, config.optimizer.max_iters, config.optimizer.tol);

  const std::size_t n = gammas.size();
  int pool = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  int inner = pool > 1 ? 1 : threads;

  std::vector<SweepRecord> records(n);
  auto run_one = [&](std::size_t i) {
    double gamma = gammas[i];
    SweepRecord rec;
    rec.gamma = gamma;
    rec.task = config.task;
    rec.system = config.system;
    rec.channel = config.channel;
    rec.gate = config.gate;
    rec.trial = trial_label(config.trial);
    rec.seed = config.fidelity.seed;

    ResolvedExperiment res = resolve(config, gamma);
    Measurement mu = evaluate_measure(res, unitary.field, config.fidelity, inner);
    rec.F_unitary = mu.F;
    rec.stderr_u = mu.std_error;

    if (gamma == 0.0) {
      Measurement mn = evaluate_measure(res, unitary.field, config.fidelity, inner);
      rec.F_nonunitary = mn.F;
      rec.stderr_n = mn.std_error;
      rec.iters_n = unitary.iterations;
      rec.J_final_n = unitary.J_history.back();
      rec.converged_n = unitary.converged;
    } else {
      ControlProblem p = res.problem;
      if (config.warm_start) {
        p.trial = unitary.field;
        p.trial.reference = p.trial.samples;
      }
      KrotovResult opt = optimize(p, config.optimizer.max_iters, config.optimizer.tol);
      Measurement mn = evaluate_measure(res, opt.field, config.fidelity, inner);
      rec.F_nonunitary = mn.F;
      rec.stderr_n = mn.std_error;
      rec.iters_n = opt.iterations;
      rec.J_final_n = opt.J_history.back();
      rec.converged_n = opt.converged;
    }
    records[i] = std::move(rec);
  };

  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> ts;
    ts.reserve(pool);
    for (int k = 0; k < pool; ++k) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return records;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  out << "gamma,task,system,channel,gate,trial,F_unitary,F_nonunitary,"
         "stderr_u,stderr_n,iters_n,J_final_n,seed\n";
  for (const auto& r : records) {
    out << fmt17(r.gamma) << ',' << r.task << ',' << r.system << ',' << r.channel << ','
        << r.gate << ',' << r.trial << ',' << fmt17(r.F_unitary) << ','
        << fmt17(r.F_nonunitary) << ',' << fmt17(r.stderr_u) << ',' << fmt17(r.stderr_n) << ','
        << r.iters_n << ',' << fmt17(r.J_final_n) << ',' << r.seed << '\n';
  }
  if (!out) throw std::runtime_error("failed writing \"" + path + "\"");
}

void save_pulse(const std::string& path, const ControlField& field, const PulseMetadata& meta) {
  require_field(field);
  ojson m;
  m["config"] = config_tree(meta.config);
  m["gamma"] = meta.gamma;
  m["iterations"] = meta.iterations;
  m["converged"] = meta.converged;
  m["J_T"] = meta.J_T;
  m["F"] = meta.F;
  m["std_error"] = meta.std_error;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  out << "{\n  \"metadata\": " << m.dump() << ",\n  \"grid\": {\"T\": " << fmt17(field.grid.T)
      << ", \"N\": " << field.grid.N << "}";
  write_sample_array(out, "samples", field.samples);
  write_sample_array(out, "envelope", field.envelope);
  write_sample_array(out, "reference", field.reference);
  out << "\n}\n";
  if (!out) throw std::runtime_error("failed writing \"" + path + "\"");
}

LoadedPulse load_pulse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pulse file \"" + path + "\"");
  ojson j = parse_or_invalid(std::string(std::istreambuf_iterator<char>(in), {}),
                             "pulse file \"" + path + "\"");
  check_keys(j, "pulse file", {"metadata", "grid", "samples", "envelope", "reference"});
  for (const char* k : {"metadata", "grid", "samples", "envelope", "reference"})
    if (!j.contains(k))
      throw std::invalid_argument(std::string("pulse file is missing \"") + k + "\"");

  const ojson& g = j.at("grid");
  check_keys(g, "grid", {"T", "N"});
  TimeGrid grid(require_num(g.at("T"), "grid.T"),
                static_cast<int>(require_int(g.at("N"), "grid.N")));

  auto read_array = [&](const char* name) {
    const ojson& a = j.at(name);
    if (!a.is_array()) throw std::invalid_argument(std::string(name) + " must be an array");
    std::vector<double> v;
    v.reserve(a.size());
    for (const auto& x : a) v.push_back(require_num(x, name));
    return v;
  };

  LoadedPulse lp;
  lp.field.grid = grid;
  lp.field.samples = read_array("samples");
  lp.field.envelope = read_array("envelope");
  lp.field.reference = read_array("reference");
  if (lp.field.samples.size() != static_cast<std::size_t>(grid.N))
    throw std::invalid_argument("pulse has " + std::to_string(lp.field.samples.size()) +
                                " samples for a grid of N = " + std::to_string(grid.N));
  require_field(lp.field);

  const ojson& m = j.at("metadata");
  check_keys(m, "metadata", {"config", "gamma", "iterations", "converged", "J_T", "F", "std_error"});
  lp.meta.config = config_from_tree(m.at("config"));
  lp.meta.gamma = require_num(m.at("gamma"), "metadata.gamma");
  lp.meta.iterations = static_cast<int>(require_int(m.at("iterations"), "metadata.iterations"));
  lp.meta.converged = require_bool(m.at("converged"), "metadata.converged");
  lp.meta.J_T = require_num(m.at("J_T"), "metadata.J_T");
  lp.meta.F = require_num(m.at("F"), "metadata.F");
  lp.meta.std_error = require_num(m.at("std_error"), "metadata.std_error");
  if (!(lp.meta.gamma >= 0.0)) throw std::invalid_argument("metadata.gamma must be >= 0");
  if (!(lp.meta.config.grid == grid))
    throw std::invalid_argument("pulse grid differs from the embedded config grid");
  return lp;
}

ReplayReport replay(const std::string& pulse_path, int threads) {
  LoadedPulse lp = load_pulse(pulse_path);
  ReplayReport rep;
  rep.meta = lp.meta;

  ResolvedExperiment res = resolve(lp.meta.config, lp.meta.gamma);
  if (!(lp.field.grid == res.problem.grid))
    throw std::invalid_argument("pulse grid differs from the experiment grid");

  ForwardData fwd = forward_all(res.problem, lp.field);
  rep.J_T = functional_JT(res.problem, fwd.finals());
  Measurement m = evaluate_measure(res, lp.field, lp.meta.config.fidelity, threads);
  rep.F = m.F;
  rep.std_error = m.std_error;
  rep.consistent =
      std::abs(rep.J_T - lp.meta.J_T) <= 1e-10 && std::abs(rep.F - lp.meta.F) <= 1e-10;
  return rep;
}

// ------- figure reproduction -------

namespace {

std::vector<double> uniform_grid(int points, double hi) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = hi * i / (points - 1);
  return g;
}

ExperimentConfig figure_base(std::uint64_t seed) {
  ExperimentConfig c;
  c.optimizer.lambda = 0.1;
  c.optimizer.max_iters = 500;
  c.optimizer.tol = 1e-7;
  c.fidelity.seed = seed;
  return c;
}

void sweep_to_csv(const ExperimentConfig& c, const std::string& path, int threads) {
  write_sweep_csv(path, run_sweep(c, threads));
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

void reproduce_fig1(const std::string& outdir, std::uint64_t seed, int threads) {
  for (const char* sys : {"qubit", "qutrit"})
    for (const char* chan : {"dephasing", "amp_damping"}) {
      ExperimentConfig c = figure_base(seed);
      c.system = sys;
      c.channel = chan;
      c.task = "state_prep";
      c.gate = "qft";
      sweep_to_csv(c, outdir + "/fig1_" + sys + "_" + chan + ".csv", threads);
    }
}

void reproduce_fig2(const std::string& outdir, std::uint64_t seed, int threads) {
  for (const char* sys : {"qubit", "qutrit"})
    for (const char* chan : {"dephasing", "amp_damping"}) {
      ExperimentConfig c = figure_base(seed);
      c.system = sys;
      c.channel = chan;
      c.task = "gate";
      c.gate = "qft";
      c.measure = "set_mean";
      sweep_to_csv(c, outdir + "/fig2_" + sys + "_" + chan + ".csv", threads);
    }
}

void reproduce_fig3(const std::string& outdir, std::uint64_t seed, int threads) {
  for (const char* sys : {"qubit", "qutrit"})
    for (const char* chan : {"dephasing", "amp_damping"}) {
      ExperimentConfig c = figure_base(seed);
      c.system = sys;
      c.channel = chan;
      c.task = "gate";
      c.gate = "qft";
      sweep_to_csv(c, outdir + "/fig3_" + sys + "_" + chan + ".csv", threads);
    }
  for (const char* chan : {"dephasing", "amp_damping"}) {
    ExperimentConfig c = figure_base(seed);
    c.system = "qubit";
    c.channel = chan;
    c.task = "gate";
    c.gate = "qft";
    c.state_set = "goerz";
    sweep_to_csv(c, outdir + "/fig3_qubit_" + chan + "_goerz.csv", threads);
  }
}

void reproduce_fig5(const std::string& outdir, std::uint64_t seed, int threads) {
  for (const char* sys : {"qubit", "qutrit"}) {
    std::vector<SweepRecord> rows;
    for (const char* gate : {"u1", "u2", "u3", "u4"})
      for (const char* chan : {"dephasing", "amp_damping"}) {
        ExperimentConfig c = figure_base(seed);
        c.system = sys;
        c.channel = chan;
        c.task = "gate";
        c.gate = gate;
        c.gamma_list = {0.01};
        std::vector<SweepRecord> recs = run_sweep(c, threads);
        rows.insert(rows.end(), recs.begin(), recs.end());
      }
    std::string path = outdir + "/fig5_" + sys + ".csv";
    write_sweep_csv(path, rows);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
}

ExperimentConfig leakage_config(const std::string& sys, const std::string& chan,
                                const TrialSpec& trial, std::uint64_t seed) {
  ExperimentConfig c = figure_base(seed);
  c.system = sys;
  c.channel = chan;
  c.task = "gate";
  c.gate = sys == "four_level" ? "x_subspace" : "x_first_qubit";
  c.state_set = sys == "four_level" ? "leakage_set" : "basis_plus_superposition";
  c.trial = trial;
  // The avoidance route in the 4-level system opens up slowly: lambda = 1 with
  // a deep iteration budget escapes the direct-route basin, lambda = 0.1 does not.
  c.optimizer.lambda = 1.0;
  c.optimizer.max_iters = sys == "two_qubit" ? 1600 : 800;
  // Re-optimizing the full-space system under noise cannot dodge anything, so the
  // honest comparison against the gamma = 0 pulse starts from it; the noisy arm
  // needs the deeper budget to settle back within its narrow improvement band.
  c.warm_start = sys == "two_qubit";
  c.gamma_list = uniform_grid(11, 0.1);
  return c;
}

void reproduce_fig6(const std::string& outdir, std::uint64_t seed, int threads) {
  const std::pair<const char*, int> resonant_levels[] = {{"leak_ii", 3}, {"leak_iii", 2},
                                                         {"leak_iv", 1}};
  for (const char* chan : {"leak_i", "leak_ii", "leak_iii", "leak_iv"}) {
    ExperimentConfig c = leakage_config("four_level", chan, TrialSpec{}, seed);
    sweep_to_csv(c, outdir + "/fig6_four_level_" + chan + "_plain.csv", threads);
  }
  for (const auto& [chan, level] : resonant_levels) {
    TrialSpec t{"resonant", level};
    ExperimentConfig c = leakage_config("four_level", chan, t, seed);
    sweep_to_csv(c, outdir + "/fig6_four_level_" + std::string(chan) + "_" + trial_label(t) + ".csv",
                 threads);
  }
  for (const char* chan : {"leak_i", "leak_ii", "leak_iii", "leak_iv"}) {
    ExperimentConfig c = leakage_config("two_qubit", chan, TrialSpec{}, seed);
    sweep_to_csv(c, outdir + "/fig6_two_qubit_" + chan + "_plain.csv", threads);
  }
}

void write_trace_csv(const std::string& path, const TimeGrid& grid, const Trajectory& traj,
                     const ControlField& eps_u, const ControlField& eps_n) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  out << "t,p0,p1,p2,p3,eps_unitary,eps_nonunitary\n";
  for (int n = 0; n <= grid.N; ++n) {
    int k = std::min(n, grid.N - 1);   // node n carries the adjacent midpoint sample
    out << fmt17(grid.node(n));
    for (int level = 0; level < 4; ++level)
      out << ',' << fmt17(traj.states[n](level, level).real());
    out << ',' << fmt17(eps_u.samples[k]) << ',' << fmt17(eps_n.samples[k]) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing \"" + path + "\"");
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

void reproduce_fig7(const std::string& outdir, std::uint64_t seed, int threads) {
  ExperimentConfig c = leakage_config("four_level", "leak_iv", TrialSpec{"resonant", 1}, seed);

  struct Panel {
    double gamma;
    ControlField field;
    Trajectory traj;
  };
  Panel panels[2] = {{0.0, {}, {}}, {0.1, {}, {}}};
  const char* tags[2] = {"gamma0", "gamma0p1"};

  for (int i = 0; i < 2; ++i) {
    ResolvedExperiment res = resolve(c, panels[i].gamma);
    KrotovResult r = optimize(res.problem, c.optimizer.max_iters, c.optimizer.tol);
    Measurement m = evaluate_measure(res, r.field, c.fidelity, threads);

    PulseMetadata meta;
    meta.config = c;
    meta.gamma = panels[i].gamma;
    meta.iterations = r.iterations;
    meta.converged = r.converged;
    meta.J_T = r.JT_history.back();
    meta.F = m.F;
    meta.std_error = m.std_error;
    std::string pulse_path = outdir + "/fig7_pulse_" + tags[i] + ".json";
    save_pulse(pulse_path, r.field, meta);
    std::fprintf(stderr, "wrote %s\n", pulse_path.c_str());

    Matrix rho0 = Matrix::Zero(4, 4);
    rho0(0, 0) = 1.0;   // the gate maps |0> onto the decaying level |1>
    panels[i].field = r.field;
    panels[i].traj =
        propagate_forward(rho0, r.field, res.problem.H0, res.problem.H1, res.problem.channel);
  }

  write_trace_csv(outdir + "/fig7.csv", c.grid, panels[1].traj, panels[0].field,
                  panels[1].field);
  write_trace_csv(outdir + "/fig7_gamma0.csv", c.grid, panels[0].traj, panels[0].field,
                  panels[1].field);
}

}  // namespace

void reproduce(int figure, const std::string& outdir, std::uint64_t seed, int threads) {
  std::filesystem::create_directories(outdir);
  switch (figure) {
    case 1: reproduce_fig1(outdir, seed, threads); break;
    case 2: reproduce_fig2(outdir, seed, threads); break;
    case 3: reproduce_fig3(outdir, seed, threads); break;
    case 5: reproduce_fig5(outdir, seed, threads); break;
    case 6: reproduce_fig6(outdir, seed, threads); break;
    case 7: reproduce_fig7(outdir, seed, threads); break;
    default:
      throw std::invalid_argument("figure must be one of 1, 2, 3, 5, 6, 7");
  }
}

}  // namespace qoct
