#include "qoct/krotov.hpp"

#include <cmath>

namespace qoct {

void ControlProblem::validate() const {
  const Eigen::Index d = H0.rows();
  if (!is_hermitian(H0)) throw std::invalid_argument("ControlProblem: H0 not Hermitian");
  if (!is_hermitian(H1)) throw std::invalid_argument("ControlProblem: H1 not Hermitian");
  if (H1.rows() != d || target.rows() != d || target.cols() != d)
    throw std::invalid_argument("ControlProblem: dimension mismatch");
  for (const auto& term : channel.terms)
    if (term.L.rows() != d) throw std::invalid_argument("ControlProblem: channel dim mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("ControlProblem: lambda must be positive");
  if (states.empty()) throw std::invalid_argument("ControlProblem: no initial states");
  double wsum = 0.0;
  for (const auto& ws : states) {
    if (ws.weight < 0.0) throw std::invalid_argument("ControlProblem: negative weight");
    require_density(ws.rho0, "ControlProblem: initial state");
    if (std::real(trace_prod(ws.rho0, ws.rho0)) <= 0.0)
      throw std::invalid_argument("ControlProblem: zero-purity initial state");
    wsum += ws.weight;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("ControlProblem: weights sum to zero");
  if (!(trial.grid == grid)) throw std::invalid_argument("ControlProblem: trial grid mismatch");
  require_field(trial);
}

double functional_JT(const ControlProblem& problem, const std::vector<Matrix>& finals) {
  if (finals.size() != problem.states.size())
    throw std::invalid_argument("functional_JT: one final state per weighted state");
  double overlap = 0.0;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    const WeightedState& ws = problem.states[i];
    const double purity = std::real(trace_prod(ws.rho0, ws.rho0));
    const Matrix sigma = problem.target * ws.rho0 * problem.target.adjoint();
    overlap += ws.weight / purity * std::real(trace_prod(sigma, finals[i]));
  }
  return 1.0 - overlap;
}

double fluence_penalty(const ControlField& field, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fluence_penalty: lambda must be positive");
  require_field(field);
  const double dt = field.grid.dt();
  double acc = 0.0;
  for (std::size_t n = 0; n < field.samples.size(); ++n) {
    const double df = field.samples[n] - field.reference[n];
    const double S = field.envelope[n];
    if (S <= 0.0) {
      if (df != 0.0)
        throw std::invalid_argument("fluence_penalty: zero envelope with eps != eps_ref");
      continue;
    }
    acc += df * df / (lambda * S) * dt;
  }
  return acc;
}

Matrix terminal_costate(const WeightedState& state, const Matrix& O) {
  if (O.rows() != state.rho0.rows() || O.cols() != state.rho0.rows())
    throw std::invalid_argument("terminal_costate: dimension mismatch");
  const double purity = std::real(trace_prod(state.rho0, state.rho0));
  return (state.weight / purity) * (O * state.rho0 * O.adjoint());
}

std::vector<Matrix> ForwardData::finals() const {
  std::vector<Matrix> out;
  out.reserve(states.size());
  for (const Trajectory& traj : states) out.push_back(traj.states.back());
  return out;
}

ForwardData forward_all(const ControlProblem& problem, const ControlField& field) {
  ForwardData fwd;
  fwd.step_mats = step_matrices(field, problem.H0, problem.H1, problem.channel);
  fwd.states.reserve(problem.states.size());
  for (const WeightedState& ws : problem.states)
    fwd.states.push_back(propagate_forward_with(fwd.step_mats, ws.rho0));
  return fwd;
}

StepOutcome krotov_step_cached(const ControlProblem& problem, const ControlField& field_k,
                               const ForwardData& fwd_k, double lambda) {
  const int N = field_k.grid.N;
  const std::size_t ns = problem.states.size();

  std::vector<Trajectory> costates(ns);
  for (std::size_t i = 0; i < ns; ++i)
    costates[i] = propagate_backward_with(fwd_k.step_mats,
                                          terminal_costate(problem.states[i], problem.target));

  const StepGenerator gen(problem.H0, problem.H1, problem.channel);
  const double dt = field_k.grid.dt();

  StepOutcome out;
  out.field = field_k;
  out.field.reference = field_k.samples;
  out.forward.step_mats.resize(N);
  out.forward.states.assign(ns, Trajectory{});
  std::vector<Vector> cur(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    out.forward.states[i].states.reserve(N + 1);
    out.forward.states[i].states.push_back(problem.states[i].rho0);
    cur[i] = vec(problem.states[i].rho0);
  }

  for (int n = 0; n < N; ++n) {
    double deps = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
      deps += std::imag(trace_prod(costates[i].states[n],
                                   commutator(problem.H1, out.forward.states[i].states.back())));
    if (!std::isfinite(deps))
      throw std::runtime_error("krotov_step: non-finite update at interval " + std::to_string(n));
    const double full = lambda * field_k.envelope[n] * deps;
    out.max_update = std::max(out.max_update, std::abs(full));
    const double eps_new = field_k.samples[n] + 0.5 * full;
    out.field.samples[n] = eps_new;
    Matrix U = gen.step(eps_new, dt);
    for (std::size_t i = 0; i < ns; ++i) {
      cur[i] = U * cur[i];
      out.forward.states[i].states.push_back(unvec(cur[i], gen.dim()));
    }
    out.forward.step_mats[n] = std::move(U);
  }
  out.penalty = fluence_penalty(out.field, lambda);
  return out;
}

std::pair<ControlField, std::vector<Trajectory>> krotov_step(const ControlProblem& problem,
                                                             const ControlField& field_k) {
  problem.validate();
  require_field(field_k);
  if (!(field_k.grid == problem.grid))
    throw std::invalid_argument("krotov_step: field grid mismatch");
  const ForwardData fwd = forward_all(problem, field_k);
  StepOutcome out = krotov_step_cached(problem, field_k, fwd, problem.lambda);
  return {std::move(out.field), std::move(out.forward.states)};
}

KrotovResult optimize(const ControlProblem& problem, int max_iters, double tol) {
  problem.validate();
  if (max_iters < 1) throw std::invalid_argument("optimize: max_iters must be >= 1");

  KrotovResult res;
  res.field = problem.trial;
  res.final_forward = forward_all(problem, res.field);
  const double JT0 = functional_JT(problem, res.final_forward.finals());
  res.JT_history.push_back(JT0);
  res.J_history.push_back(JT0 + fluence_penalty(res.field, problem.lambda));
  res.reason = "max_iters reached";

  double lambda_eff = problem.lambda;
  for (int k = 0; k < max_iters; ++k) {
    StepOutcome out = krotov_step_cached(problem, res.field, res.final_forward, lambda_eff);
    double JT_new = functional_JT(problem, out.forward.finals());
    double J_new = JT_new + out.penalty;
    if (J_new > res.J_history.back()) {
      bool recovered = false;
      while (res.safeguard_doublings < 6) {
        ++res.safeguard_doublings;
        lambda_eff *= 0.5;   // doubling the penalty weight halves the accepted step
        out = krotov_step_cached(problem, res.field, res.final_forward, lambda_eff);
        JT_new = functional_JT(problem, out.forward.finals());
        J_new = JT_new + out.penalty;
        if (J_new <= res.J_history.back()) {
          recovered = true;
          break;
        }
      }
      if (!recovered) {
        res.converged = false;
        res.reason = "non-monotonic step after safeguard";
        return res;
      }
    }
    res.field = std::move(out.field);
    res.final_forward = std::move(out.forward);
    res.J_history.push_back(J_new);
    res.JT_history.push_back(JT_new);
    res.iterations = k + 1;
    if (std::abs(res.J_history[k + 1] - res.J_history[k]) < tol &&
        out.max_update < 10.0 * tol) {
      res.converged = true;
      res.reason = "functional and update stationary within tolerance";
      break;
    }
  }
  return res;
}

}  // namespace qoct
