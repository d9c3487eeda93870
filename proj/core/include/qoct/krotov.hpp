// krotov.hpp — monotonic Krotov iteration for Lindblad control problems:
// functional evaluation, terminal co-states, sequential field update, and
// convergence control with a penalty-weight safeguard.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qoct/dynamics.hpp"

namespace qoct {

struct WeightedState {
  Matrix rho0;
  double weight = 1.0;
};

struct ControlProblem {
  Matrix H0, H1;                      // Hermitian
  NoiseChannel channel;
  Matrix target;                      // gate O
  std::vector<WeightedState> states;
  TimeGrid grid;
  double lambda = 1.0;                // step weight; the update magnitude is lambda S dEps
  ControlField trial;

  void validate() const;
};

// J_T = 1 - sum_i w_i / Tr[rho_i(0)^2] * Re Tr[O rho_i(0) O^+ rho_i(T)]
double functional_JT(const ControlProblem& problem, const std::vector<Matrix>& finals);

// integral (eps - eps_ref)^2 / (lambda S) dt by midpoint quadrature; a zero
// envelope sample requires eps == eps_ref there, otherwise the penalty is ill-posed.
double fluence_penalty(const ControlField& field, double lambda);

// phi(T) = w / Tr[rho0^2] * O rho0 O^+
Matrix terminal_costate(const WeightedState& state, const Matrix& O);

// Trajectories and per-interval step matrices under one field.
struct ForwardData {
  std::vector<Matrix> step_mats;
  std::vector<Trajectory> states;     // one per weighted state
  std::vector<Matrix> finals() const;
};
ForwardData forward_all(const ControlProblem& problem, const ControlField& field);

struct StepOutcome {
  ControlField field;     // updated control; reference = the previous samples
  ForwardData forward;    // trajectories under the updated control
  double penalty = 0.0;   // fluence penalty of the update at the lambda used
  double max_update = 0.0;   // max_t |lambda S(t) dEps(t)|
};

// One sequential sweep from field_k: co-states run backward under field_k, states
// run forward under the field being built, and each interval sets
//   eps_new = eps + 1/2 lambda S dEps,   dEps = Im sum_i Tr{phi_i [H1, rho_i]}.
// The half step is the stationary point of J in the update, giving dJ = -penalty
// for linear dynamics; the full step cancels the J_T gain against the penalty.
StepOutcome krotov_step_cached(const ControlProblem& problem, const ControlField& field_k,
                               const ForwardData& fwd_k, double lambda);
std::pair<ControlField, std::vector<Trajectory>> krotov_step(const ControlProblem& problem,
                                                             const ControlField& field_k);

struct KrotovResult {
  ControlField field;
  std::vector<double> J_history;    // entry 0 is the trial functional; non-increasing
  std::vector<double> JT_history;
  int iterations = 0;
  bool converged = false;
  std::string reason;
  int safeguard_doublings = 0;      // penalty-weight doublings spent (sticky, <= 6 per run)
  ForwardData final_forward;        // trajectories under the returned field
};

// Iterates krotov_step until |dJ| < tol and max_update < 10 tol, or max_iters.
KrotovResult optimize(const ControlProblem& problem, int max_iters = 1000, double tol = 1e-7);

}  // namespace qoct
