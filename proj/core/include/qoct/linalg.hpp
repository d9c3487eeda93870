// linalg.hpp — dense complex linear algebra for small dimensions: vectorization,
// Hermitian checks, density-matrix validation, matrix functions.
// Column-stacking convention throughout: vec stacks columns, vec(AXB) = (B^T (x) A) vec(X).
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qoct {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;

constexpr double kHermitianTol = 1e-10;   // max element deviation from A = A^+
constexpr double kTraceTol     = 1e-10;
constexpr double kEigenFloor   = -1e-9;   // density eigenvalues below this are invalid

// ------- basics -------

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

inline Matrix dag(const Matrix& A) { return A.adjoint(); }

inline Matrix commutator(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw std::invalid_argument("commutator: dimension mismatch");
  return A * B - B * A;
}

inline Matrix kron(const Matrix& A, const Matrix& B) {
  return Eigen::kroneckerProduct(A, B).eval();
}

inline Vector vec(const Matrix& A) {
  return Eigen::Map<const Vector>(A.data(), A.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) throw std::invalid_argument("unvec: size is not d^2");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

// Tr[A B] without forming the product.
inline Complex trace_prod(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.cols() || A.cols() != B.rows())
    throw std::invalid_argument("trace_prod: dimension mismatch");
  return A.transpose().cwiseProduct(B).sum();
}

inline Matrix hermitize(const Matrix& A) { return 0.5 * (A + A.adjoint()); }

inline bool is_hermitian(const Matrix& A, double tol = kHermitianTol) {
  return A.rows() == A.cols() && (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// ------- density-matrix contract -------

// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-9.
inline void require_density(const Matrix& rho, const std::string& what = "density matrix") {
  if (rho.rows() != rho.cols()) throw std::invalid_argument(what + ": not square");
  if (!rho.allFinite()) throw std::invalid_argument(what + ": non-finite entries");
  if (!is_hermitian(rho)) throw std::invalid_argument(what + ": not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument(what + ": trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenFloor)
    throw std::invalid_argument(what + ": negative eigenvalue");
}

// ------- matrix functions -------

struct Eigh {
  Eigen::VectorXd values;   // ascending
  Matrix vectors;           // columns are the eigenvectors
};

inline Eigh eigh(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(A));
  if (es.info() != Eigen::Success) throw std::runtime_error("eigh: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Square root of a Hermitian PSD matrix; eigenvalues in [-1e-9, 0) are rounding
// noise and clamp to zero.
inline Matrix herm_sqrt(const Matrix& A) {
  Eigh e = eigh(A);
  Eigen::VectorXd s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

inline Matrix expm(const Matrix& A) { return A.exp(); }

}  // namespace qoct
