#include "qoct/fidelity.hpp"

#include <cmath>
#include <thread>

namespace qoct {

double state_fidelity(const Matrix& rhoT, const Matrix& O, const Vector& psi0) {
  if (O.rows() != rhoT.rows() || psi0.size() != rhoT.rows())
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("state_fidelity: psi0 not normalized");
  const Vector u = O * psi0;
  return std::real((u.adjoint() * rhoT * u).value());
}

double uhlmann_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  const Matrix s = herm_sqrt(hermitize(sigma));
  const double tr = herm_sqrt(hermitize(s * rho * s)).trace().real();
  return tr * tr;
}

double mean_fidelity_states(const std::vector<Matrix>& finals,
                            const std::vector<Matrix>& targets) {
  if (finals.empty() || finals.size() != targets.size())
    throw std::invalid_argument("mean_fidelity_states: one target per final state");
  double acc = 0.0;
  for (std::size_t i = 0; i < finals.size(); ++i)
    acc += uhlmann_fidelity(finals[i], targets[i]);
  return acc / static_cast<double>(finals.size());
}

Vector RandomStateSampler::sample_at(std::uint64_t k) const {
  const std::size_t s = support.empty() ? static_cast<std::size_t>(dim) : support.size();
  if (s == 0 || dim <= 0) throw std::invalid_argument("RandomStateSampler: empty support");
  Vector v = Vector::Zero(dim);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    const std::uint64_t base = 2 * s * k + 2 * j;
    const Complex a(rng_normal(seed, base), rng_normal(seed, base + 1));
    const int idx = support.empty() ? static_cast<int>(j) : support[j];
    if (idx < 0 || idx >= dim) throw std::invalid_argument("RandomStateSampler: bad support level");
    v(idx) = a;
    norm2 += std::norm(a);
  }
  if (norm2 == 0.0) {
    v(support.empty() ? 0 : support[0]) = Complex(1.0, 0.0);
    return v;
  }
  return v / std::sqrt(norm2);
}

Vector RandomStateSampler::sample_pure() { return sample_at(counter++); }

namespace {

// Per-sample fidelities stored by index, then reduced sequentially.
MonteCarloResult reduce_in_order(const std::vector<double>& vals) {
  const double n = static_cast<double>(vals.size());
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

MonteCarloResult mean_gate_fidelity_of_channel(const Matrix& C, const Matrix& O,
                                               const std::vector<int>& levels, int Ns,
                                               std::uint64_t seed, int threads) {
  if (Ns < 2) throw std::invalid_argument("mean_gate_fidelity: Ns must be >= 2");
  const Eigen::Index d = O.rows();
  if (C.rows() != d * d || C.cols() != d * d)
    throw std::invalid_argument("mean_gate_fidelity: channel matrix is not d^2 x d^2");
  const RandomStateSampler sampler{static_cast<int>(d), seed, 0, levels};
  std::vector<double> vals(Ns);
  auto run = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      const Vector phi = sampler.sample_at(static_cast<std::uint64_t>(k));
      const Matrix rhoT = unvec(C * vec((phi * phi.adjoint()).eval()), d);
      const Vector u = O * phi;
      vals[k] = std::real((u.adjoint() * rhoT * u).value());
    }
  };
  const int workers = std::max(1, std::min(threads, Ns));
  if (workers == 1) {
    run(0, Ns);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (Ns + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(run, w * chunk, std::min(Ns, (w + 1) * chunk));
    for (auto& t : pool) t.join();
  }
  return reduce_in_order(vals);
}

MonteCarloResult mean_gate_fidelity(const ControlProblem& problem, const ControlField& field,
                                    const std::vector<int>& levels, int Ns,
                                    std::uint64_t seed, int threads) {
  const Matrix C = channel_matrix(field, problem.H0, problem.H1, problem.channel);
  return mean_gate_fidelity_of_channel(C, problem.target, levels, Ns, seed, threads);
}

MonteCarloResult mean_gate_fidelity_direct(const ControlProblem& problem,
                                           const ControlField& field,
                                           const std::vector<int>& levels, int Ns,
                                           std::uint64_t seed) {
  if (Ns < 2) throw std::invalid_argument("mean_gate_fidelity_direct: Ns must be >= 2");
  const auto mats = step_matrices(field, problem.H0, problem.H1, problem.channel);
  const Eigen::Index d = problem.target.rows();
  RandomStateSampler sampler{static_cast<int>(d), seed, 0, levels};
  std::vector<double> vals(Ns);
  for (int k = 0; k < Ns; ++k) {
    const Vector phi = sampler.sample_at(static_cast<std::uint64_t>(k));
    const Trajectory traj = propagate_forward_with(mats, (phi * phi.adjoint()).eval());
    vals[k] = state_fidelity(traj.states.back(), problem.target, phi);
  }
  return reduce_in_order(vals);
}

double average_gate_fidelity_of_channel(const Matrix& C, const Matrix& O,
                                        const std::vector<int>& levels) {
  const Eigen::Index d = O.rows();
  if (C.rows() != d * d || C.cols() != d * d)
    throw std::invalid_argument("average_gate_fidelity: channel matrix is not d^2 x d^2");
  std::vector<int> S = levels;
  if (S.empty())
    for (int l = 0; l < d; ++l) S.push_back(l);
  const double s = static_cast<double>(S.size());
  const auto apply = [&](const Matrix& X) { return (O.adjoint() * unvec(C * vec(X), d) * O).eval(); };
  Matrix P = Matrix::Zero(d, d);
  for (int l : S) P(l, l) = Complex(1.0, 0.0);
  const double t1 = std::real(trace_prod(P, apply(P)));
  Complex fe(0.0, 0.0);
  for (int i : S)
    for (int j : S) {
      Matrix Eij = Matrix::Zero(d, d);
      Eij(i, j) = Complex(1.0, 0.0);
      fe += apply(Eij)(i, j);
    }
  return (t1 + std::real(fe)) / (s * (s + 1.0));
}

double exact_average_gate_fidelity(const ControlProblem& problem, const ControlField& field,
                                   const std::vector<int>& levels) {
  const Matrix C = channel_matrix(field, problem.H0, problem.H1, problem.channel);
  return average_gate_fidelity_of_channel(C, problem.target, levels);
}

}  // namespace qoct
