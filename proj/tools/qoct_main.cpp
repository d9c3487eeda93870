// qoct — optimize, sweep, reproduce, and replay entry points over the library.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qoct/experiments.hpp"

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void warn_unconverged(const std::vector<qoct::SweepRecord>& records) {
  for (const auto& r : records)
    if (!r.converged_n)
      std::fprintf(stderr, "warning: optimization at gamma = %.6g hit the iteration cap\n",
                   r.gamma);
}

int run_optimize(const std::string& config_path, double gamma, bool gamma_set,
                 const std::string& out, std::uint64_t seed, bool seed_set, int threads) {
  qoct::ExperimentConfig cfg = qoct::load_config(config_path);
  if (seed_set) cfg.fidelity.seed = seed;
  if (!gamma_set) gamma = cfg.gamma_list.empty() ? 0.0 : cfg.gamma_list.front();

  qoct::ResolvedExperiment res = qoct::resolve(cfg, gamma);
  if (res.h1_flagged)
    std::fprintf(stderr, "note: gate \"%s\" has a diagonal pattern; using the system coupling\n",
                 res.gate.name.c_str());
  qoct::KrotovResult r = qoct::optimize(res.problem, cfg.optimizer.max_iters, cfg.optimizer.tol);
  qoct::Measurement m = qoct::evaluate_measure(res, r.field, cfg.fidelity, threads);

  qoct::PulseMetadata meta;
  meta.config = cfg;
  meta.gamma = gamma;
  meta.iterations = r.iterations;
  meta.converged = r.converged;
  meta.J_T = r.JT_history.back();
  meta.F = m.F;
  meta.std_error = m.std_error;
  qoct::save_pulse(out, r.field, meta);

  std::printf("gamma      %.17g\n", gamma);
  std::printf("iterations %d\n", r.iterations);
  std::printf("converged  %s (%s)\n", r.converged ? "yes" : "no", r.reason.c_str());
  std::printf("J_T        %.17g\n", meta.J_T);
  std::printf("F          %.17g\n", meta.F);
  if (m.std_error > 0.0) std::printf("std_error  %.17g\n", m.std_error);
  std::printf("pulse      %s\n", out.c_str());
  return r.converged ? 0 : 2;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out, bool out_set,
                  std::uint64_t seed, bool seed_set, int threads) {
  qoct::ExperimentConfig cfg = qoct::load_config(config_path);
  if (seed_set) cfg.fidelity.seed = seed;
  std::string path = out_set ? out : cfg.output;

  std::vector<qoct::SweepRecord> records = qoct::run_sweep(cfg, threads);
  warn_unconverged(records);
  qoct::write_sweep_csv(path, records);
  std::printf("wrote %s (%zu records)\n", path.c_str(), records.size());
  return 0;
}

int run_replay(const std::string& pulse_path, int threads) {
  qoct::ReplayReport rep = qoct::replay(pulse_path, threads);
  std::printf("recorded  J_T %.17g  F %.17g\n", rep.meta.J_T, rep.meta.F);
  std::printf("replayed  J_T %.17g  F %.17g\n", rep.J_T, rep.F);
  std::printf("consistent %s\n", rep.consistent ? "yes" : "no");
  return rep.consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krotov optimal control of open quantum systems"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Monte-Carlo seed (overrides the config)");
  app.add_option("--threads", threads, "Worker threads; 0 = hardware concurrency");

  std::string config_path, out_path, pulse_path;
  double gamma = 0.0;
  int figure = 1;

  CLI::App* opt = app.add_subcommand("optimize", "Optimize one pulse and save it");
  opt->fallthrough();
  opt->add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* gamma_opt = opt->add_option("--gamma", gamma, "Decay rate gamma/omega0");
  opt->add_option("--out", out_path, "Pulse output path")->default_val("pulse.json");

  CLI::App* swp = app.add_subcommand("sweep", "Run a gamma sweep and write the CSV");
  swp->fallthrough();
  swp->add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* sweep_out = swp->add_option("--out", out_path, "CSV output path (default: config output)");

  CLI::App* rep = app.add_subcommand("reproduce", "Write one figure's data files");
  rep->fallthrough();
  rep->add_option("--figure", figure, "Figure id")->required()->check(CLI::IsMember({1, 2, 3, 5, 6, 7}));
  rep->add_option("--out", out_path, "Output directory")->required();

  CLI::App* rpl = app.add_subcommand("replay", "Re-evaluate a saved pulse");
  rpl->fallthrough();
  rpl->add_option("--pulse", pulse_path, "Pulse file")->required();

  CLI11_PARSE(app, argc, argv);

  int nthreads = resolve_threads(threads);
  bool seed_set = seed_opt->count() > 0;
  try {
    if (opt->parsed())
      return run_optimize(config_path, gamma, gamma_opt->count() > 0, out_path, seed, seed_set,
                          nthreads);
    if (swp->parsed())
      return run_sweep_cmd(config_path, out_path, sweep_out->count() > 0, seed, seed_set,
                           nthreads);
    if (rep->parsed()) {
      qoct::reproduce(figure, out_path, seed, nthreads);
      return 0;
    }
    if (rpl->parsed()) return run_replay(pulse_path, nthreads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
