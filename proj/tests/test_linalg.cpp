#include <doctest.h>

#include "qoct/linalg.hpp"
#include "test_util.hpp"

using namespace qoct;

namespace {
const Matrix sx = (Matrix(2, 2) << 0, 1, 1, 0).finished();
const Matrix sy = (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
const Matrix sz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
}  // namespace

TEST_CASE("commutator: [sz, sx] = 2i sy") {
  Matrix c = commutator(sz, sx);
  CHECK((c - Complex(0, 2) * sy).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK_THROWS_AS(commutator(sz, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("dag reverses products") {
  Matrix A = test::random_matrix(1, 3, 3), B = test::random_matrix(2, 3, 3);
  CHECK((dag(A * B) - dag(B) * dag(A)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("vec/unvec round-trip and column stacking") {
  Matrix A = test::random_matrix(3, 3, 3);
  CHECK((unvec(vec(A), 3) - A).cwiseAbs().maxCoeff() == 0.0);
  // column stacking: vec component d*j + i is A(i, j)
  CHECK(vec(A)(3 * 2 + 1) == A(1, 2));
  CHECK_THROWS_AS(unvec(Vector::Zero(5), 2), std::invalid_argument);
}

TEST_CASE("vec(A X B) = (B^T (x) A) vec(X)") {
  Matrix A = test::random_matrix(4, 3, 3), X = test::random_matrix(5, 3, 3),
         B = test::random_matrix(6, 3, 3);
  Vector lhs = vec(A * X * B);
  Vector rhs = kron(B.transpose(), A) * vec(X);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace_prod equals Tr[AB]") {
  Matrix A = test::random_matrix(7, 4, 4), B = test::random_matrix(8, 4, 4);
  Complex direct = (A * B).trace();
  CHECK(std::abs(trace_prod(A, B) - direct) < 1e-12);
  CHECK_THROWS_AS(trace_prod(A, Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("hermitize and is_hermitian") {
  Matrix A = test::random_matrix(9, 3, 3);
  Matrix H = hermitize(A);
  CHECK(is_hermitian(H));
  CHECK(!is_hermitian(A));
  CHECK((hermitize(H) - H).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("require_density accepts states and rejects non-states") {
  CHECK_NOTHROW(require_density(test::random_density(10, 3)));

  Matrix not_trace_one = 2.0 * test::random_density(11, 2);
  CHECK_THROWS_AS(require_density(not_trace_one), std::invalid_argument);

  Matrix not_hermitian = test::random_density(12, 2);
  not_hermitian(0, 1) += Complex(0.3, 0.1);
  CHECK_THROWS_AS(require_density(not_hermitian), std::invalid_argument);

  // Hermitian, unit trace, but an eigenvalue is -0.5
  Matrix indefinite = (Matrix(2, 2) << 1.5, 0, 0, -0.5).finished();
  CHECK_THROWS_AS(require_density(indefinite), std::invalid_argument);
}

TEST_CASE("eigh reconstructs Hermitian matrices with ascending spectrum") {
  Matrix H = test::random_hermitian(13, 4);
  Eigh e = eigh(H);
  Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
  CHECK((rebuilt - H).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i + 1 < e.values.size(); ++i) CHECK(e.values(i) <= e.values(i + 1));
  CHECK((e.vectors.adjoint() * e.vectors - identity(4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("herm_sqrt squares back on PSD input") {
  Matrix B = test::random_matrix(14, 3, 3);
  Matrix S = B * B.adjoint();
  Matrix R = herm_sqrt(S);
  CHECK((R * R - S).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(is_hermitian(R, 1e-12));
}

TEST_CASE("expm oracles") {
  // exp(i theta sx) = cos(theta) I + i sin(theta) sx
  double theta = 0.7;
  Matrix E = expm(Complex(0, 1) * theta * sx);
  Matrix expected = std::cos(theta) * identity(2) + Complex(0, 1) * std::sin(theta) * sx;
  CHECK((E - expected).cwiseAbs().maxCoeff() < 1e-14);

  Matrix D = (Matrix(2, 2) << Complex(-0.3, 0), 0, 0, Complex(0, 1.2)).finished();
  Matrix ED = expm(D);
  CHECK(std::abs(ED(0, 0) - std::exp(Complex(-0.3, 0))) < 1e-15);
  CHECK(std::abs(ED(1, 1) - std::exp(Complex(0, 1.2))) < 1e-15);
  CHECK(std::abs(ED(0, 1)) == 0.0);
}
