// fidelity.hpp — state fidelity, Uhlmann fidelity, and the mean gate fidelity:
// deterministic Monte-Carlo estimate plus its exact channel-matrix counterpart.
#pragma once

#include <cstdint>
#include <vector>

#include "qoct/krotov.hpp"
#include "qoct/rng.hpp"

namespace qoct {

// <psi0| O^+ rho(T) O |psi0>; the imaginary part is rounding noise and is dropped.
double state_fidelity(const Matrix& rhoT, const Matrix& O, const Vector& psi0);

// (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2; symmetric in its arguments.
double uhlmann_fidelity(const Matrix& rho, const Matrix& sigma);

// F_n: arithmetic mean of uhlmann_fidelity(target_i, final_i).
double mean_fidelity_states(const std::vector<Matrix>& finals, const std::vector<Matrix>& targets);

// Haar-uniform pure states on a support subspace.  Sample k is a pure function
// of (seed, k): amplitude j of sample k uses the normal indices
// (k 2s + 2j, k 2s + 2j + 1), s = support size, so any draw order agrees.
struct RandomStateSampler {
  int dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;
  std::vector<int> support;   // empty = all levels

  Vector sample_at(std::uint64_t k) const;
  Vector sample_pure();   // draws at `counter`, then advances it
};

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

// F_m over Ns sampled pure states, evaluated through the end-to-end channel
// matrix; per-sample values are reduced in index order, so the result does not
// depend on the thread count.
MonteCarloResult mean_gate_fidelity(const ControlProblem& problem, const ControlField& field,
                                    const std::vector<int>& levels, int Ns,
                                    std::uint64_t seed, int threads = 1);
// Per-state propagation variant (validation path; mathematically identical).
MonteCarloResult mean_gate_fidelity_direct(const ControlProblem& problem,
                                           const ControlField& field,
                                           const std::vector<int>& levels, int Ns,
                                           std::uint64_t seed);
MonteCarloResult mean_gate_fidelity_of_channel(const Matrix& C, const Matrix& O,
                                               const std::vector<int>& levels, int Ns,
                                               std::uint64_t seed, int threads = 1);

// Haar average of <phi| O^+ E(|phi><phi|) O |phi> over the subspace S:
// (Tr[P Lam(P)] + sum_{ij in S} <i|Lam(|i><j|)|j>) / (s (s+1)), Lam = O^+ E(.) O.
double exact_average_gate_fidelity(const ControlProblem& problem, const ControlField& field,
                                   const std::vector<int>& levels);
double average_gate_fidelity_of_channel(const Matrix& C, const Matrix& O,
                                        const std::vector<int>& levels);

}  // namespace qoct
