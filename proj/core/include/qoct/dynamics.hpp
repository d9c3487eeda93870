// dynamics.hpp — Lindblad channel, Liouvillian superoperator, time grid, and
// piecewise-constant propagation of states (forward) and co-states (backward).
#pragma once

#include <vector>

#include "qoct/linalg.hpp"

namespace qoct {

// ------- noise channel -------

struct NoiseTerm {
  Matrix L;              // Lindblad operator
  double gamma = 0.0;    // decay rate, units of omega0, >= 0
};

struct NoiseChannel {
  std::vector<NoiseTerm> terms;

  NoiseChannel() = default;
  explicit NoiseChannel(std::vector<NoiseTerm> t);   // validates rates and dims
  bool empty() const { return terms.empty(); }
};

// D[rho] = 1/2 sum_j gamma_j (2 L_j rho L_j^+ - L_j^+L_j rho - rho L_j^+L_j);
// traceless for Hermitian rho.
Matrix dissipator(const NoiseChannel& channel, const Matrix& rho);

// D^+[xi]: transpose of D under the bilinear pairing, Tr[D^+[xi] rho] = Tr[xi D[rho]].
Matrix adjoint_dissipator(const NoiseChannel& channel, const Matrix& xi);

// Column-stacking superoperator of rho -> -i[H, rho] + D[rho]; H must be Hermitian.
Matrix liouvillian(const Matrix& H, const NoiseChannel& channel);

// ------- time grid and control -------

struct TimeGrid {
  double T = 10.0;   // horizon, units of tau = 1/omega0
  int    N = 2000;   // intervals, >= 2

  TimeGrid() = default;
  TimeGrid(double T_, int N_);
  double dt() const { return T / N; }
  double node(int n) const { return n * dt(); }
  double mid(int n) const { return (n + 0.5) * dt(); }
};
bool operator==(const TimeGrid& a, const TimeGrid& b);

// Piecewise-constant control; samples/envelope/reference hold interval-midpoint values.
struct ControlField {
  TimeGrid grid;
  std::vector<double> samples;     // eps, units of omega0
  std::vector<double> envelope;    // S(t) in [0, 1]
  std::vector<double> reference;   // eps_ref for the fluence penalty
};

// Finite samples, envelope within [0, 1], all arrays of length grid.N.
void require_field(const ControlField& field);

struct Trajectory {
  std::vector<Matrix> states;   // N+1 snapshots at grid nodes
};

// ------- propagation -------

// Caches the drift and control superoperators; step(eps, dt) = exp(dt L(H0 + eps H1)).
class StepGenerator {
 public:
  StepGenerator(const Matrix& H0, const Matrix& H1, const NoiseChannel& channel);
  Matrix step(double eps, double dt) const;
  Eigen::Index dim() const { return dim_; }

 private:
  Matrix L0_, L1_;
  Eigen::Index dim_;
};

Matrix step_matrix(const Matrix& H0, const Matrix& H1, double eps,
                   const NoiseChannel& channel, double dt);

Matrix step_forward(const Matrix& rho, double eps, const Matrix& H0, const Matrix& H1,
                    const NoiseChannel& channel, double dt);

// Backward co-state step over [t-dt, t]: the adjoint of the forward step, which
// integrates dphi/dt = -i[H, phi] - D^+[phi] from t down to t-dt.  With matched
// steps Tr[phi(t) rho(t)] is constant along the joint evolution.
Matrix step_backward(const Matrix& phi, double eps, const Matrix& H0, const Matrix& H1,
                     const NoiseChannel& channel, double dt);

Trajectory propagate_forward(const Matrix& rho0, const ControlField& field,
                             const Matrix& H0, const Matrix& H1, const NoiseChannel& channel);
Trajectory propagate_backward(const Matrix& phiT, const ControlField& field,
                              const Matrix& H0, const Matrix& H1, const NoiseChannel& channel);

// Per-interval step matrices for one field; shared by every initial state.
std::vector<Matrix> step_matrices(const ControlField& field, const Matrix& H0,
                                  const Matrix& H1, const NoiseChannel& channel);
Trajectory propagate_forward_with(const std::vector<Matrix>& mats, const Matrix& rho0);
Trajectory propagate_backward_with(const std::vector<Matrix>& mats, const Matrix& phiT);

// End-to-end channel matrix C = U_{N-1} ... U_0 acting on vec(rho(0)).
Matrix channel_matrix(const std::vector<Matrix>& mats);
Matrix channel_matrix(const ControlField& field, const Matrix& H0, const Matrix& H1,
                      const NoiseChannel& channel);

}  // namespace qoct
