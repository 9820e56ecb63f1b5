#pragma once

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace zzp {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

enum class Axis { x, y, z };

/// Operators on this many qubits or more are stored sparse.
inline constexpr int kSparseQubitThreshold = 7;

/// Basis convention: qubit 0 is the most significant bit of the basis index.
inline std::uint64_t qubit_mask(int num_qubits, int qubit) {
  return std::uint64_t{1} << (num_qubits - 1 - qubit);
}

/// A 2^n x 2^n operator held either dense or sparse.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix dense);
  explicit OperatorMatrix(SparseMatrix sparse);

  int dimension() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }

  const Matrix& dense() const;
  const SparseMatrix& sparse() const;
  Matrix to_dense() const;

  Vector apply(const Vector& v) const;

 private:
  std::variant<Matrix, SparseMatrix> data_;
};

/// Accumulates a sum of single-qubit Pauli terms and ZZ products, then
/// materializes it. Every such sum has at most n+1 nonzeros per column:
/// a diagonal plus one bit-flip per qubit.
class OperatorBuilder {
 public:
  explicit OperatorBuilder(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dimension() const { return dim_; }

  OperatorBuilder& add_pauli(cd coeff, int qubit, Axis axis);
  OperatorBuilder& add_zz(double coeff, int a, int b);

  /// Dense below kSparseQubitThreshold unless forced.
  OperatorMatrix build() const;
  Matrix build_dense() const;
  SparseMatrix build_sparse() const;

  const std::vector<cd>& diagonal() const { return diag_; }

 private:
  void check_qubit(int q) const;

  int num_qubits_;
  std::uint64_t dim_;
  std::vector<cd> diag_;
  // flip_[q][col]: amplitude of |col ^ mask(q)> in H|col>
  std::vector<std::vector<cd>> flip_;
};

/// I x ... x sigma^axis x ... x I with qubit 0 most significant.
OperatorMatrix pauli_on(int num_qubits, int index, Axis axis);

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant (Higham 2005).
Matrix expm(const Matrix& a);

/// exp(-i t H) v for Hermitian H by restarted Lanczos; `tol` bounds the
/// local error estimate of each substep.
Vector expm_multiply(const OperatorMatrix& h, const Vector& v, double t, double tol = 1e-12);

/// exp(-i t H) V for a block of columns by truncated Taylor series with
/// substeps of 1-norm at most four; terms stop below `tol` relative.
Matrix expm_multiply(const OperatorMatrix& h, const Matrix& v, double t, double tol = 1e-16);

/// exp(-i t H) as a dense matrix: Pade for dense operators, column-wise
/// Lanczos for sparse ones.
Matrix evolution_operator(const OperatorMatrix& h, double t);

double unitarity_error(const Matrix& u);
double hermiticity_error(const Matrix& h);
double max_abs(const Matrix& m);

/// Kronecker product a x b (a acts on the more significant qubits).
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace zzp
