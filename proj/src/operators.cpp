#include "zzpulse/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace zzp {

OperatorMatrix::OperatorMatrix(Matrix dense) : data_(std::move(dense)) {}
OperatorMatrix::OperatorMatrix(SparseMatrix sparse) : data_(std::move(sparse)) {}

int OperatorMatrix::dimension() const {
  return std::visit([](const auto& m) { return static_cast<int>(m.rows()); }, data_);
}

const Matrix& OperatorMatrix::dense() const {
  if (const auto* m = std::get_if<Matrix>(&data_)) return *m;
  throw std::logic_error("OperatorMatrix: dense() called on sparse storage");
}

const SparseMatrix& OperatorMatrix::sparse() const {
  if (const auto* m = std::get_if<SparseMatrix>(&data_)) return *m;
  throw std::logic_error("OperatorMatrix: sparse() called on dense storage");
}

Matrix OperatorMatrix::to_dense() const {
  if (is_sparse()) return Matrix(sparse());
  return dense();
}

Vector OperatorMatrix::apply(const Vector& v) const {
  if (v.size() != dimension()) throw std::invalid_argument("OperatorMatrix::apply: dimension mismatch");
  return std::visit([&](const auto& m) -> Vector { return m * v; }, data_);
}

OperatorBuilder::OperatorBuilder(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > 24) {
    throw std::invalid_argument("OperatorBuilder: qubit count must be in [1, 24], got " +
                                std::to_string(num_qubits));
  }
  dim_ = std::uint64_t{1} << num_qubits;
  diag_.assign(dim_, cd{0.0, 0.0});
  flip_.resize(num_qubits);
}

void OperatorBuilder::check_qubit(int q) const {
  if (q < 0 || q >= num_qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(num_qubits_) + " qubits");
  }
}

OperatorBuilder& OperatorBuilder::add_pauli(cd coeff, int qubit, Axis axis) {
  check_qubit(qubit);
  const std::uint64_t mask = qubit_mask(num_qubits_, qubit);
  if (axis == Axis::z) {
    for (std::uint64_t s = 0; s < dim_; ++s) diag_[s] += (s & mask) ? -coeff : coeff;
    return *this;
  }
  auto& f = flip_[qubit];
  if (f.empty()) f.assign(dim_, cd{0.0, 0.0});
  if (axis == Axis::x) {
    for (std::uint64_t s = 0; s < dim_; ++s) f[s] += coeff;
  } else {
    // Y|0> = i|1>, Y|1> = -i|0>
    const cd i{0.0, 1.0};
    for (std::uint64_t s = 0; s < dim_; ++s) f[s] += (s & mask) ? -i * coeff : i * coeff;
  }
  return *this;
}

OperatorBuilder& OperatorBuilder::add_zz(double coeff, int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw std::invalid_argument("add_zz: identical qubits");
  const std::uint64_t ma = qubit_mask(num_qubits_, a);
  const std::uint64_t mb = qubit_mask(num_qubits_, b);
  for (std::uint64_t s = 0; s < dim_; ++s) {
    const bool parity = ((s & ma) != 0) != ((s & mb) != 0);
    diag_[s] += parity ? -coeff : coeff;
  }
  return *this;
}

Matrix OperatorBuilder::build_dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Matrix m = Matrix::Zero(n, n);
  for (std::uint64_t s = 0; s < dim_; ++s) m(s, s) = diag_[s];
  for (int q = 0; q < num_qubits_; ++q) {
    if (flip_[q].empty()) continue;
    const std::uint64_t mask = qubit_mask(num_qubits_, q);
    for (std::uint64_t s = 0; s < dim_; ++s) m(s ^ mask, s) += flip_[q][s];
  }
  return m;
}

SparseMatrix OperatorBuilder::build_sparse() const {
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(dim_ * (num_qubits_ + 1));
  for (std::uint64_t s = 0; s < dim_; ++s) {
    if (diag_[s] != cd{0.0, 0.0}) triplets.emplace_back(s, s, diag_[s]);
  }
  for (int q = 0; q < num_qubits_; ++q) {
    if (flip_[q].empty()) continue;
    const std::uint64_t mask = qubit_mask(num_qubits_, q);
    for (std::uint64_t s = 0; s < dim_; ++s) {
      if (flip_[q][s] != cd{0.0, 0.0}) triplets.emplace_back(s ^ mask, s, flip_[q][s]);
    }
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

OperatorMatrix OperatorBuilder::build() const {
  if (num_qubits_ >= kSparseQubitThreshold) return OperatorMatrix(build_sparse());
  return OperatorMatrix(build_dense());
}

OperatorMatrix pauli_on(int num_qubits, int index, Axis axis) {
  if (index < 0 || index >= num_qubits) {
    throw std::out_of_range("pauli_on: index " + std::to_string(index) + " out of range for " +
                            std::to_string(num_qubits) + " qubits");
  }
  return OperatorBuilder(num_qubits).add_pauli(1.0, index, axis).build();
}

namespace {

double one_norm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix not square");
  if (!a.allFinite()) throw std::invalid_argument("expm: non-finite entries");
  const auto n = a.rows();
  if (n == 0) return a;

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm = one_norm(a);
  int s = 0;
  if (norm > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const Matrix as = a / std::ldexp(1.0, s);

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

namespace {

// One Lanczos pass from normalized q0; returns the tridiagonal coefficients
// and basis. Stops early on invariant subspace.
struct LanczosBasis {
  std::vector<Vector> q;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[k] couples q[k] and q[k+1]
  bool exhausted = false;
};

LanczosBasis lanczos(const OperatorMatrix& h, const Vector& q0, int max_dim) {
  LanczosBasis lb;
  lb.q.push_back(q0);
  for (int k = 0; k < max_dim; ++k) {
    Vector w = h.apply(lb.q[k]);
    const double a = lb.q[k].dot(w).real();
    lb.alpha.push_back(a);
    w -= a * lb.q[k];
    if (k > 0) w -= lb.beta[k - 1] * lb.q[k - 1];
    // full reorthogonalization keeps the small basis accurate to 1e-14
    for (const auto& qj : lb.q) w -= qj.dot(w) * qj;
    const double bnorm = w.norm();
    if (bnorm < 1e-13) {
      lb.exhausted = true;
      break;
    }
    lb.beta.push_back(bnorm);
    if (k + 1 < max_dim) lb.q.push_back(w / bnorm);
  }
  return lb;
}

}  // namespace

Vector expm_multiply(const OperatorMatrix& h, const Vector& v, double t, double tol) {
  if (v.size() != h.dimension()) throw std::invalid_argument("expm_multiply: dimension mismatch");
  const double vnorm = v.norm();
  if (vnorm == 0.0 || t == 0.0) return v;

  constexpr int kMaxDim = 30;
  const int max_dim = std::min<int>(kMaxDim, h.dimension());
  Vector w = v;
  double remaining = t;
  double step = t;
  while (std::abs(remaining) > 0.0) {
    const double wnorm = w.norm();
    LanczosBasis lb = lanczos(h, w / wnorm, max_dim);
    const int m = static_cast<int>(lb.alpha.size());

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      tri(k, k) = lb.alpha[k];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = lb.beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::VectorXd& evals = es.eigenvalues();
    const Eigen::MatrixXd& evecs = es.eigenvectors();

    auto small_prop = [&](double dt) {
      // exp(-i dt T) e_1
      Eigen::VectorXcd c(m);
      for (int k = 0; k < m; ++k) c(k) = std::exp(cd{0.0, -dt * evals(k)}) * evecs(0, k);
      Eigen::VectorXcd y = evecs.cast<cd>() * c;
      return y;
    };

    step = std::copysign(std::min(std::abs(step), std::abs(remaining)), remaining);
    Eigen::VectorXcd y;
    for (int attempt = 0;; ++attempt) {
      y = small_prop(step);
      // error estimate: weight on the last Krylov vector times the next beta
      const double err = (lb.exhausted || m < max_dim) ? 0.0
                                                        : std::abs(y(m - 1)) * lb.beta[m - 1];
      if (err <= tol || attempt > 60) break;
      step *= 0.5;
    }
    Vector next = Vector::Zero(w.size());
    for (int k = 0; k < m; ++k) next += y(k) * lb.q[k];
    w = wnorm * next;
    remaining -= step;
    if (std::abs(remaining) < 1e-15 * std::abs(t)) break;
    step *= 2.0;
  }
  return w;
}

Matrix expm_multiply(const OperatorMatrix& h, const Matrix& v, double t, double tol) {
  if (v.rows() != h.dimension()) throw std::invalid_argument("expm_multiply: dimension mismatch");
  if (v.size() == 0 || t == 0.0) return v;
  double norm1 = 0.0;
  if (h.is_sparse()) {
    const SparseMatrix& s = h.sparse();
    for (Eigen::Index c = 0; c < s.outerSize(); ++c) {
      double col = 0.0;
      for (SparseMatrix::InnerIterator it(s, c); it; ++it) col += std::abs(it.value());
      norm1 = std::max(norm1, col);
    }
  } else {
    norm1 = h.dense().cwiseAbs().colwise().sum().maxCoeff();
  }
  // Norm 4 per substep keeps the largest Taylor term near 10, so cancellation
  // costs about one digit.
  constexpr double kSubstepNorm = 4.0;
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * norm1 / kSubstepNorm)));
  const cd factor{0.0, -t / substeps};
  auto multiply = [&](const Matrix& x) -> Matrix {
    if (h.is_sparse()) return h.sparse() * x;
    return h.dense() * x;
  };

  Matrix w = v;
  for (int s = 0; s < substeps; ++s) {
    Matrix term = w;
    Matrix sum = w;
    const double scale = sum.cwiseAbs().maxCoeff();
    for (int k = 1; k <= 80; ++k) {
      term = (factor / static_cast<double>(k)) * multiply(term);
      sum += term;
      if (term.cwiseAbs().maxCoeff() <= tol * scale) break;
    }
    w = std::move(sum);
  }
  return w;
}

Matrix evolution_operator(const OperatorMatrix& h, double t) {
  const cd minus_i_t{0.0, -t};
  if (!h.is_sparse()) return expm(minus_i_t * h.dense());
  const int n = h.dimension();
  Matrix u(n, n);
  for (int col = 0; col < n; ++col) {
    Vector e = Vector::Zero(n);
    e(col) = 1.0;
    u.col(col) = expm_multiply(h, e, t);
  }
  return u;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_error(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

double hermiticity_error(const Matrix& h) { return max_abs(h - h.adjoint()); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

}  // namespace zzp
