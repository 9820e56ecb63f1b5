#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "zzpulse/operators.hpp"

using namespace zzp;

namespace {

Matrix random_hermitian(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = cd{g(rng), g(rng)};
  return 0.5 * (a + a.adjoint());
}

// exp(-i t H) through the spectral decomposition.
Matrix spectral_evolution(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phases(k) = std::polar(1.0, -t * es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("pauli_on single qubit z is diag(1,-1)") {
  const Matrix z = pauli_on(1, 0, Axis::z).dense();
  CHECK(z(0, 0) == cd{1.0});
  CHECK(z(1, 1) == cd{-1.0});
  CHECK(z(0, 1) == cd{0.0});
}

TEST_CASE("pauli_on x on qubit 1 of 2 maps |00> to |01>") {
  Vector v = Vector::Zero(4);
  v(0) = 1.0;
  const Vector out = pauli_on(2, 1, Axis::x).apply(v);
  CHECK(std::abs(out(1) - 1.0) < 1e-15);
  CHECK(std::abs(out.norm() - 1.0) < 1e-15);
}

TEST_CASE("z0 z2 diagonal on three qubits") {
  const Matrix prod = pauli_on(3, 0, Axis::z).dense() * pauli_on(3, 2, Axis::z).dense();
  for (int s = 0; s < 8; ++s) {
    const int z0 = (s >> 2) & 1;
    const int z2 = s & 1;
    const double expect = (z0 == z2) ? 1.0 : -1.0;
    CHECK(prod(s, s).real() == doctest::Approx(expect));
  }
}

TEST_CASE("pauli_on rejects out-of-range qubits") {
  CHECK_THROWS_AS(pauli_on(2, 2, Axis::x), std::out_of_range);
  CHECK_THROWS(pauli_on(2, -1, Axis::x));
}

TEST_CASE("pauli y acts as i|1><0| - i|0><1|") {
  const Matrix y = pauli_on(1, 0, Axis::y).dense();
  CHECK(y(1, 0) == cd{0.0, 1.0});
  CHECK(y(0, 1) == cd{0.0, -1.0});
}

TEST_CASE("builder sparse and dense forms agree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  OperatorBuilder b(7);
  for (int q = 0; q < 7; ++q) {
    b.add_pauli(u(rng), q, Axis::x).add_pauli(u(rng), q, Axis::y).add_pauli(u(rng), q, Axis::z);
    if (q + 1 < 7) b.add_zz(u(rng), q, q + 1);
  }
  const OperatorMatrix op = b.build();
  CHECK(op.is_sparse());
  CHECK(max_abs(op.to_dense() - b.build_dense()) < 1e-15);
  CHECK(hermiticity_error(b.build_dense()) <= 1e-14);
  // Same sum assembled from explicit Kronecker-embedded Paulis.
}

TEST_CASE("builder matches a sum of embedded Paulis") {
  OperatorBuilder b(3);
  b.add_pauli(0.3, 0, Axis::x).add_pauli(-0.7, 2, Axis::y).add_zz(1.1, 0, 1);
  const Matrix ref = 0.3 * pauli_on(3, 0, Axis::x).dense() - 0.7 * pauli_on(3, 2, Axis::y).dense() +
                     1.1 * pauli_on(3, 0, Axis::z).dense() * pauli_on(3, 1, Axis::z).dense();
  CHECK(max_abs(b.build_dense() - ref) < 1e-15);
}

TEST_CASE("pade expm matches spectral exponential") {
  std::mt19937_64 rng(11);
  for (int dim : {2, 4, 8, 16, 64}) {
    for (double scale : {0.01, 1.0, 20.0}) {
      const Matrix h = random_hermitian(dim, rng, scale);
      const Matrix u = expm(cd{0.0, -0.37} * h);
      CHECK(max_abs(u - spectral_evolution(h, 0.37)) < 1e-11 * std::max(1.0, scale));
      CHECK(unitarity_error(u) < 1e-12 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("expm of zero and of a diagonal") {
  CHECK(max_abs(expm(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)) < 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const Matrix e = expm(d);
  CHECK(std::abs(e(0, 0) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(e(1, 1) - std::exp(-2.0)) < 1e-15);
}

TEST_CASE("lanczos expm_multiply agrees with dense exponential") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  OperatorBuilder b(8);
  for (int q = 0; q < 8; ++q) {
    b.add_pauli(u(rng), q, Axis::x).add_pauli(u(rng), q, Axis::y);
    b.add_zz(u(rng), q, (q + 1) % 8);
  }
  const OperatorMatrix h = b.build();
  REQUIRE(h.is_sparse());
  Vector v(256);
  std::normal_distribution<double> g;
  for (int k = 0; k < 256; ++k) v(k) = cd{g(rng), g(rng)};
  v.normalize();
  const Matrix dense = h.to_dense();
  for (double t : {0.01, 0.5, 4.0}) {
    const Vector ref = spectral_evolution(dense, t) * v;
    CHECK((expm_multiply(h, v, t) - ref).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("taylor expm_multiply on a block of columns agrees with dense exponential") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  OperatorBuilder b(8);
  for (int q = 0; q < 8; ++q) {
    b.add_pauli(u(rng), q, Axis::x).add_pauli(u(rng), q, Axis::y);
    b.add_zz(u(rng), q, (q + 2) % 8);
  }
  const OperatorMatrix h = b.build();
  REQUIRE(h.is_sparse());
  const Matrix dense = h.to_dense();
  Matrix v = Matrix::Random(256, 5);
  for (double t : {0.01, 0.5, 4.0}) {
    const Matrix ref = spectral_evolution(dense, t) * v;
    CHECK(max_abs(expm_multiply(h, v, t) - ref) < 1e-11);
    CHECK(max_abs(expm_multiply(OperatorMatrix(dense), v, t) - ref) < 1e-11);
  }
}

TEST_CASE("evolution_operator on sparse input is unitary and matches dense") {
  OperatorBuilder b(7);
  for (int q = 0; q < 7; ++q) b.add_pauli(0.4 + 0.1 * q, q, Axis::x).add_zz(1.0, q, (q + 1) % 7);
  const OperatorMatrix h = b.build();
  const Matrix u = evolution_operator(h, 0.8);
  CHECK(unitarity_error(u) < 1e-12);
  CHECK(max_abs(u - spectral_evolution(h.to_dense(), 0.8)) < 1e-11);
}

TEST_CASE("kron places the first factor on the high qubits") {
  const Matrix x = pauli_on(1, 0, Axis::x).dense();
  const Matrix z = pauli_on(1, 0, Axis::z).dense();
  const Matrix k = kron(x, z);
  const Matrix ref = pauli_on(2, 0, Axis::x).dense() * pauli_on(2, 1, Axis::z).dense();
  CHECK(max_abs(k - ref) == 0.0);
}
