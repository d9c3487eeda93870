#include "qoct/dynamics.hpp"

namespace qoct {

NoiseChannel::NoiseChannel(std::vector<NoiseTerm> t) : terms(std::move(t)) {
  for (const auto& term : terms) {
    if (term.gamma < 0.0) throw std::invalid_argument("NoiseChannel: negative decay rate");
    if (term.L.rows() != term.L.cols())
      throw std::invalid_argument("NoiseChannel: operator not square");
    if (term.L.rows() != terms.front().L.rows())
      throw std::invalid_argument("NoiseChannel: operator dimensions differ");
  }
}

Matrix dissipator(const NoiseChannel& channel, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& [L, gamma] : channel.terms) {
    if (L.rows() != rho.rows()) throw std::invalid_argument("dissipator: dimension mismatch");
    const Matrix LdL = L.adjoint() * L;
    out += gamma * (L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL));
  }
  return out;
}

Matrix adjoint_dissipator(const NoiseChannel& channel, const Matrix& xi) {
  Matrix out = Matrix::Zero(xi.rows(), xi.cols());
  for (const auto& [L, gamma] : channel.terms) {
    if (L.rows() != xi.rows())
      throw std::invalid_argument("adjoint_dissipator: dimension mismatch");
    const Matrix LdL = L.adjoint() * L;
    out += gamma * (L.adjoint() * xi * L - 0.5 * (LdL * xi + xi * LdL));
  }
  return out;
}

Matrix liouvillian(const Matrix& H, const NoiseChannel& channel) {
  if (!is_hermitian(H)) throw std::invalid_argument("liouvillian: H is not Hermitian");
  const Eigen::Index d = H.rows();
  const Matrix id = identity(d);
  const Complex i1(0.0, 1.0);
  Matrix sup = -i1 * (kron(id, H) - kron(H.transpose(), id));
  for (const auto& [L, gamma] : channel.terms) {
    if (L.rows() != d) throw std::invalid_argument("liouvillian: dimension mismatch");
    const Matrix LdL = L.adjoint() * L;
    sup += gamma * (kron(L.conjugate(), L)
                    - 0.5 * kron(id, LdL) - 0.5 * kron(LdL.transpose(), id));
  }
  return sup;
}

TimeGrid::TimeGrid(double T_, int N_) : T(T_), N(N_) {
  if (N < 2) throw std::invalid_argument("TimeGrid: N must be >= 2");
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
}

bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.T == b.T && a.N == b.N; }

void require_field(const ControlField& field) {
  const std::size_t n = static_cast<std::size_t>(field.grid.N);
  if (field.samples.size() != n || field.envelope.size() != n || field.reference.size() != n)
    throw std::invalid_argument("ControlField: arrays must have grid.N entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(field.samples[i]) || !std::isfinite(field.reference[i]))
      throw std::invalid_argument("ControlField: non-finite sample");
    if (!(field.envelope[i] >= 0.0 && field.envelope[i] <= 1.0))
      throw std::invalid_argument("ControlField: envelope outside [0, 1]");
  }
}

StepGenerator::StepGenerator(const Matrix& H0, const Matrix& H1, const NoiseChannel& channel)
    : L0_(liouvillian(H0, channel)), L1_(liouvillian(H1, NoiseChannel{})), dim_(H0.rows()) {
  if (H1.rows() != H0.rows()) throw std::invalid_argument("StepGenerator: H0/H1 dims differ");
}

Matrix StepGenerator::step(double eps, double dt) const {
  return expm(dt * (L0_ + eps * L1_));
}

Matrix step_matrix(const Matrix& H0, const Matrix& H1, double eps,
                   const NoiseChannel& channel, double dt) {
  return StepGenerator(H0, H1, channel).step(eps, dt);
}

Matrix step_forward(const Matrix& rho, double eps, const Matrix& H0, const Matrix& H1,
                    const NoiseChannel& channel, double dt) {
  if (!std::isfinite(eps)) throw std::invalid_argument("step_forward: eps not finite");
  return unvec(step_matrix(H0, H1, eps, channel, dt) * vec(rho), rho.rows());
}

Matrix step_backward(const Matrix& phi, double eps, const Matrix& H0, const Matrix& H1,
                     const NoiseChannel& channel, double dt) {
  if (!std::isfinite(eps)) throw std::invalid_argument("step_backward: eps not finite");
  return unvec(step_matrix(H0, H1, eps, channel, dt).adjoint() * vec(phi), phi.rows());
}

std::vector<Matrix> step_matrices(const ControlField& field, const Matrix& H0,
                                  const Matrix& H1, const NoiseChannel& channel) {
  require_field(field);
  const StepGenerator gen(H0, H1, channel);
  const double dt = field.grid.dt();
  std::vector<Matrix> mats;
  mats.reserve(field.samples.size());
  for (double eps : field.samples) mats.push_back(gen.step(eps, dt));
  return mats;
}

Trajectory propagate_forward_with(const std::vector<Matrix>& mats, const Matrix& rho0) {
  const Eigen::Index d = rho0.rows();
  Trajectory traj;
  traj.states.reserve(mats.size() + 1);
  traj.states.push_back(rho0);
  Vector v = vec(rho0);
  for (const Matrix& U : mats) {
    v = U * v;
    traj.states.push_back(unvec(v, d));
  }
  return traj;
}

Trajectory propagate_backward_with(const std::vector<Matrix>& mats, const Matrix& phiT) {
  const Eigen::Index d = phiT.rows();
  const int N = static_cast<int>(mats.size());
  Trajectory traj;
  traj.states.assign(N + 1, Matrix());
  traj.states[N] = phiT;
  Vector v = vec(phiT);
  for (int n = N - 1; n >= 0; --n) {
    v = mats[n].adjoint() * v;
    traj.states[n] = unvec(v, d);
  }
  return traj;
}

Trajectory propagate_forward(const Matrix& rho0, const ControlField& field,
                             const Matrix& H0, const Matrix& H1, const NoiseChannel& channel) {
  require_density(rho0, "propagate_forward: rho0");
  return propagate_forward_with(step_matrices(field, H0, H1, channel), rho0);
}

Trajectory propagate_backward(const Matrix& phiT, const ControlField& field,
                              const Matrix& H0, const Matrix& H1, const NoiseChannel& channel) {
  if (!phiT.allFinite()) throw std::invalid_argument("propagate_backward: phiT not finite");
  return propagate_backward_with(step_matrices(field, H0, H1, channel), phiT);
}

Matrix channel_matrix(const std::vector<Matrix>& mats) {
  if (mats.empty()) throw std::invalid_argument("channel_matrix: no step matrices");
  Matrix C = Matrix::Identity(mats.front().rows(), mats.front().cols());
  for (const Matrix& U : mats) C = U * C;
  return C;
}

Matrix channel_matrix(const ControlField& field, const Matrix& H0, const Matrix& H1,
                      const NoiseChannel& channel) {
  return channel_matrix(step_matrices(field, H0, H1, channel));
}

}  // namespace qoct
