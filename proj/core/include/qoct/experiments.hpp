// experiments.hpp — declarative experiment configs, gamma sweeps, figure
// reproduction, and pulse/CSV persistence.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qoct/fidelity.hpp"
#include "qoct/models.hpp"

namespace qoct {

struct TrialSpec {
  std::string type = "plain";   // plain | resonant
  int level = 1;                // Bohr level omega_{level,0} for resonant trials
};

struct OptimizerSpec {
  double lambda = 1.0;
  int max_iters = 1000;
  double tol = 1e-7;
};

struct FidelitySpec {
  int Ns = 20736;               // 12^4 Monte-Carlo samples
  std::uint64_t seed = 42;
};

struct ExperimentConfig {
  std::string system = "qubit";
  std::string channel = "dephasing";
  std::vector<double> gamma_list;        // empty = 21 uniform points on [0, 0.1]
  std::string gate = "qft";
  std::string task = "state_prep";       // state_prep | gate
  std::string state_set = "basis_plus_superposition";
  TrialSpec trial;
  TimeGrid grid{10.0, 2000};
  OptimizerSpec optimizer;
  FidelitySpec fidelity;
  std::string measure = "auto";          // auto | state | set_mean | mc_mean
  std::string h1_source = "auto";        // auto | system | gate
  bool warm_start = false;               // seed non-unitary runs with the gamma = 0 pulse
  double A0 = 1e-2;
  double t_r_fraction = 1.0 / 30.0;      // ramp width as a fraction of T
  std::string output = "sweep.csv";
};

std::vector<double> default_gamma_grid();   // 21 uniform points on [0, 0.1]

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

// ------- resolution against the catalogs -------

struct ResolvedExperiment {
  SystemSpec sys;
  GateSpec gate;
  ControlProblem problem;
  std::vector<int> fidelity_levels;   // sampling subspace for F_m
  std::string measure;                // state | set_mean | mc_mean
  bool h1_flagged = false;            // gate-pattern coupling commuted with H0; fell back
};
ResolvedExperiment resolve(const ExperimentConfig& config, double gamma);

struct Measurement {
  double F = 0.0;
  double std_error = 0.0;
};
Measurement evaluate_measure(const ResolvedExperiment& res, const ControlField& field,
                             const FidelitySpec& fid, int threads = 1);

// ------- sweeps -------

struct SweepRecord {
  double gamma = 0.0;
  std::string task, system, channel, gate, trial;
  double F_unitary = 0.0, F_nonunitary = 0.0;
  double stderr_u = 0.0, stderr_n = 0.0;
  int iters_n = 0;
  double J_final_n = 0.0;
  std::uint64_t seed = 0;
  bool converged_n = true;   // in-memory flag; the CSV schema is fixed
};

// One gamma = 0 optimization gives the unitary pulse; each gamma then evaluates
// that pulse under noise and runs a fresh (or warm-started) optimization.
// Records are ordered by gamma regardless of worker completion order.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, int threads = 1);

// Fixed schema: gamma,task,system,channel,gate,trial,F_unitary,F_nonunitary,
//               stderr_u,stderr_n,iters_n,J_final_n,seed
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);

// ------- pulse persistence -------

struct PulseMetadata {
  ExperimentConfig config;
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
  double J_T = 0.0;
  double F = 0.0;
  double std_error = 0.0;
};

// Samples are written with 17 significant digits; save -> load round-trips bit-exactly.
void save_pulse(const std::string& path, const ControlField& field, const PulseMetadata& meta);

struct LoadedPulse {
  ControlField field;
  PulseMetadata meta;
};
LoadedPulse load_pulse(const std::string& path);

struct ReplayReport {
  PulseMetadata meta;
  double J_T = 0.0;
  double F = 0.0;
  double std_error = 0.0;
  bool consistent = false;   // replayed J_T and F match the recorded values within 1e-10
};
ReplayReport replay(const std::string& pulse_path, int threads = 1);

// ------- figure reproduction -------

// Figures: 1 state-prep sweeps, 2 state-set (F_n) sweeps, 3 Monte-Carlo (F_m)
// sweeps with Goerz variants, 5 per-gate fidelities at gamma = 0.01,
// 6 leakage sweeps, 7 population traces and pulses for the leak_iv case.
void reproduce(int figure, const std::string& outdir, std::uint64_t seed, int threads = 1);

}  // namespace qoct
