// Deterministic pseudo-random test fixtures built on the library's own stream.
#pragma once

#include <cstdint>

#include "qoct/linalg.hpp"
#include "qoct/dynamics.hpp"
#include "qoct/rng.hpp"

namespace qoct::test {

inline Matrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  Matrix A(rows, cols);
  std::uint64_t k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      A(i, j) = Complex(rng_normal(seed, k), rng_normal(seed, k + 1));
      k += 2;
    }
  return A;
}

inline Matrix random_hermitian(std::uint64_t seed, Eigen::Index d) {
  return hermitize(random_matrix(seed, d, d));
}

// Full-rank density matrix G G^+ / Tr.
inline Matrix random_density(std::uint64_t seed, Eigen::Index d) {
  Matrix G = random_matrix(seed, d, d);
  Matrix rho = G * G.adjoint();
  return rho / rho.trace().real();
}

// Eigenvectors of a random Hermitian matrix form a Haar-like unitary.
inline Matrix random_unitary(std::uint64_t seed, Eigen::Index d) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(random_hermitian(seed, d));
  return es.eigenvectors();
}

inline ControlField random_field(std::uint64_t seed, const TimeGrid& grid, double amp = 0.2) {
  ControlField f;
  f.grid = grid;
  f.samples.resize(grid.N);
  f.envelope.assign(grid.N, 1.0);
  for (int n = 0; n < grid.N; ++n)
    f.samples[n] = amp * (2.0 * rng_uniform(seed, static_cast<std::uint64_t>(n)) - 1.0);
  f.reference = f.samples;
  return f;
}

}  // namespace qoct::test
