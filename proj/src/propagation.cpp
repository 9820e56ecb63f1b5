#include "zzpulse/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace zzp {

int TargetGate::num_qubits() const {
  int n = 0;
  while ((Eigen::Index{1} << n) < matrix.rows()) ++n;
  return n;
}

namespace {

Matrix mat2(cd a, cd b, cd c, cd d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const std::map<std::string, Matrix>& gate_table() {
  static const std::map<std::string, Matrix> table = [] {
    const double r = 1.0 / std::numbers::sqrt2;
    const cd i{0.0, 1.0};
    std::map<std::string, Matrix> t;
    t["I"] = Matrix::Identity(2, 2);
    t["H"] = mat2(r, r, r, -r);
    t["T"] = mat2(1.0, 0.0, 0.0, std::exp(i * std::numbers::pi / 4.0));
    t["S"] = mat2(1.0, 0.0, 0.0, i);
    t["X"] = mat2(0.0, 1.0, 1.0, 0.0);
    t["Y"] = mat2(0.0, -i, i, 0.0);
    t["Z"] = mat2(1.0, 0.0, 0.0, -1.0);
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    t["CNOT"] = cnot;
    Matrix cz = Matrix::Identity(4, 4);
    cz(3, 3) = -1.0;
    t["CZ"] = cz;
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    t["SWAP"] = swap;
    t["I2"] = Matrix::Identity(4, 4);
    return t;
  }();
  return table;
}

std::string canonical_label(const std::string& label) {
  if (label == "CX") return "CNOT";
  if (label == "PI8" || label == "pi/8") return "T";
  return label;
}

}  // namespace

bool is_known_gate(const std::string& label) { return gate_table().contains(canonical_label(label)); }

TargetGate target_from_label(const std::string& label) {
  const auto& table = gate_table();
  const auto it = table.find(canonical_label(label));
  if (it == table.end()) throw std::invalid_argument("unknown gate label '" + label + "'");
  return {it->first, it->second};
}

TargetGate tensor_product(const std::vector<TargetGate>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: no factors");
  TargetGate out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    out.label += "*" + factors[k].label;
    out.matrix = kron(out.matrix, factors[k].matrix);
  }
  return out;
}

SectorOperator::SectorOperator(int num_center, int num_boundary, std::vector<Matrix> sectors)
    : num_center_(num_center), num_boundary_(num_boundary), sectors_(std::move(sectors)) {
  if (static_cast<int>(sectors_.size()) != (1 << num_boundary_)) {
    throw std::invalid_argument("SectorOperator: expected 2^boundary sectors");
  }
}

Matrix SectorOperator::to_dense() const {
  const int dc = 1 << num_center_;
  const int nsec = 1 << num_boundary_;
  Matrix full = Matrix::Zero(dc * nsec, dc * nsec);
  for (int b = 0; b < nsec; ++b) {
    for (int r = 0; r < dc; ++r) {
      for (int c = 0; c < dc; ++c) full(r * nsec + b, c * nsec + b) = sectors_[b](r, c);
    }
  }
  return full;
}

namespace {

template <int Dim>
using Mat = Eigen::Matrix<cd, Dim, Dim>;
template <int Dim>
using RealVec = Eigen::Matrix<double, Dim, 1>;

/// Everything about a (block, controls, params) triple that is shared across
/// boundary sectors.
template <int Dim>
struct SectorSetup {
  int num_center = 0;
  int num_boundary = 0;
  int dim = 0;
  int bins = 0;
  double dt = 0.0;
  std::vector<Mat<Dim>> drive;           // [bin]
  std::vector<Mat<Dim>> control_ops;     // [bin * 2C + 2j + q]
  std::vector<RealVec<Dim>> diagonal;    // [sector]
};

template <int Dim>
SectorSetup<Dim> make_setup(const Block& block, const ControlVector& controls, const ParameterPoint& params) {
  check_parameters(block, params);
  if (controls.channels() != block.num_center()) {
    throw std::invalid_argument("control vector channels do not match the block center");
  }
  for (double v : controls.values()) {
    if (!std::isfinite(v)) throw std::invalid_argument("propagate: non-finite envelope value");
  }
  SectorSetup<Dim> s;
  s.num_center = block.num_center();
  s.num_boundary = block.num_boundary();
  s.dim = 1 << s.num_center;
  s.bins = controls.bins();
  s.dt = controls.time_step();
  if (Dim != Eigen::Dynamic && Dim != s.dim) throw std::logic_error("sector kernel dimension mismatch");

  const int nc = s.num_center;
  const int nb = s.num_boundary;
  const int n_total = nc + nb;
  const int nsec = 1 << nb;
  const cd i{0.0, 1.0};

  s.diagonal.resize(nsec);
  for (int b = 0; b < nsec; ++b) {
    RealVec<Dim> d = RealVec<Dim>::Zero(s.dim);
    for (int c = 0; c < s.dim; ++c) {
      const unsigned full = (static_cast<unsigned>(c) << nb) | static_cast<unsigned>(b);
      double e = 0.0;
      for (std::size_t k = 0; k < block.couplings.size(); ++k) {
        const auto& cp = block.couplings[k];
        const bool zi = (full >> (n_total - 1 - cp.i)) & 1U;
        const bool zj = (full >> (n_total - 1 - cp.j)) & 1U;
        e += (zi == zj) ? params.couplings[k] : -params.couplings[k];
      }
      d(c) = e;
    }
    s.diagonal[b] = d;
  }

  auto pauli_x = [&](int j) {
    Mat<Dim> m = Mat<Dim>::Zero(s.dim, s.dim);
    const int mask = 1 << (nc - 1 - j);
    for (int c = 0; c < s.dim; ++c) m(c ^ mask, c) = 1.0;
    return m;
  };
  auto pauli_y = [&](int j) {
    Mat<Dim> m = Mat<Dim>::Zero(s.dim, s.dim);
    const int mask = 1 << (nc - 1 - j);
    for (int c = 0; c < s.dim; ++c) m(c ^ mask, c) = (c & mask) ? -i : i;
    return m;
  };
  std::vector<Mat<Dim>> xs, ys;
  for (int j = 0; j < nc; ++j) {
    xs.push_back(pauli_x(j));
    ys.push_back(pauli_y(j));
  }

  s.drive.resize(s.bins);
  s.control_ops.resize(static_cast<std::size_t>(s.bins) * 2 * nc);
  for (int n = 0; n < s.bins; ++n) {
    Mat<Dim> h = Mat<Dim>::Zero(s.dim, s.dim);
    for (int j = 0; j < nc; ++j) {
      const double half_alpha = 0.5 * params.amplitude_scales[j];
      const double phase = params.detunings[j] * controls.midpoint(n);
      const double cs = std::cos(phase);
      const double sn = std::sin(phase);
      const RotatedEnvelope env = envelope_at_bin(controls, j, n, params.detunings[j]);
      h += half_alpha * (env.in_phase * xs[j] + env.quadrature * ys[j]);
      s.control_ops[(static_cast<std::size_t>(n) * nc + j) * 2 + 0] = half_alpha * (cs * xs[j] - sn * ys[j]);
      s.control_ops[(static_cast<std::size_t>(n) * nc + j) * 2 + 1] = half_alpha * (cs * ys[j] + sn * xs[j]);
    }
    s.drive[n] = h;
  }
  return s;
}

template <int Dim>
void run_sector(const SectorSetup<Dim>& s, int sector, detail::SectorTrajectory<Dim>& t) {
  t.step.resize(s.bins);
  t.forward.resize(s.bins);
  t.eigvecs.resize(s.bins);
  t.eigvals.resize(s.bins);
  Eigen::SelfAdjointEigenSolver<Mat<Dim>> solver(s.dim);
  Eigen::Matrix<cd, Dim, 1> phases(s.dim);
  for (int n = 0; n < s.bins; ++n) {
    Mat<Dim> h = s.drive[n];
    h.diagonal() += s.diagonal[sector].template cast<cd>();
    solver.compute(h, Eigen::ComputeEigenvectors);
    t.eigvals[n] = solver.eigenvalues();
    t.eigvecs[n] = solver.eigenvectors();
    for (int k = 0; k < s.dim; ++k) phases(k) = std::polar(1.0, -t.eigvals[n](k) * s.dt);
    const Mat<Dim>& v = t.eigvecs[n];
    t.step[n] = v * phases.asDiagonal() * v.adjoint();
    t.forward[n] = (n == 0) ? t.step[n] : Mat<Dim>(t.step[n] * t.forward[n - 1]);
  }
}

inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

/// Adds d/dOmega of Re(weight * tr[U_final^dagger W]) ... expressed through
/// tr[dU_n Y_n] with Y_n = F_{n-1} W^dagger B_{n+1}. `weight` is 2 z / D.
template <int Dim>
void accumulate_gradient(const SectorSetup<Dim>& s, int sector, const detail::SectorTrajectory<Dim>& t,
                         const Mat<Dim>& w_dagger, cd weight, GradientMethod method, std::span<double> grad) {
  const int nc = s.num_center;
  const Mat<Dim> ident = Mat<Dim>::Identity(s.dim, s.dim);
  Mat<Dim> back = ident;  // B_{n+1}
  Mat<Dim> gamma(s.dim, s.dim);
  const cd minus_i_dt{0.0, -s.dt};
  for (int n = s.bins - 1; n >= 0; --n) {
    const Mat<Dim> y = (n > 0 ? Mat<Dim>(t.forward[n - 1] * w_dagger) : w_dagger) * back;
    const Mat<Dim>& v = t.eigvecs[n];
    if (method == GradientMethod::exact) {
      const auto& lam = t.eigvals[n];
      for (int k = 0; k < s.dim; ++k) {
        for (int l = 0; l < s.dim; ++l) {
          gamma(k, l) = minus_i_dt * std::polar(1.0, -0.5 * (lam(k) + lam(l)) * s.dt) *
                        sinc(0.5 * (lam(k) - lam(l)) * s.dt);
        }
      }
      const Mat<Dim> y_eig = v.adjoint() * y * v;
      const Mat<Dim> gy = gamma.cwiseProduct(y_eig.transpose());
      for (int j = 0; j < nc; ++j) {
        for (int q = 0; q < 2; ++q) {
          const Mat<Dim>& k_op = s.control_ops[(static_cast<std::size_t>(n) * nc + j) * 2 + q];
          const Mat<Dim> k_eig = v.adjoint() * k_op * v;
          const cd tr = k_eig.cwiseProduct(gy).sum();
          grad[ControlVector::flat_index(s.bins, j, n, static_cast<Quadrature>(q))] += (weight * tr).real();
        }
      }
    } else {
      Mat<Dim> h = s.drive[n];
      h.diagonal() += s.diagonal[sector].template cast<cd>();
      // dU_n = U_n {-i dt K + dt^2/2 [H, K]}; with U_n on the right the
      // commutator term changes sign.
      const Mat<Dim> yu = y * t.step[n];
      for (int j = 0; j < nc; ++j) {
        for (int q = 0; q < 2; ++q) {
          const Mat<Dim>& k_op = s.control_ops[(static_cast<std::size_t>(n) * nc + j) * 2 + q];
          const Mat<Dim> g = minus_i_dt * k_op + (0.5 * s.dt * s.dt) * (h * k_op - k_op * h);
          const cd tr = (g * yu).trace();
          grad[ControlVector::flat_index(s.bins, j, n, static_cast<Quadrature>(q))] += (weight * tr).real();
        }
      }
    }
    back = back * t.step[n];
  }
}

template <int Dim>
Mat<Dim> target_matrix(const TargetGate& target, int dim) {
  if (target.matrix.rows() != dim || target.matrix.cols() != dim) {
    throw std::invalid_argument("target gate '" + target.label + "' has dimension " +
                                std::to_string(target.matrix.rows()) + ", block center needs " + std::to_string(dim));
  }
  return Mat<Dim>(target.matrix);
}

template <int Dim>
FidelityEvaluation evaluate_impl(const Block& block, const ControlVector& controls, const ParameterPoint& params,
                                 const TargetGate& target, bool with_gradient) {
  const SectorSetup<Dim> s = make_setup<Dim>(block, controls, params);
  const Mat<Dim> w = target_matrix<Dim>(target, s.dim);
  const int nsec = 1 << s.num_boundary;
  const double full_dim = static_cast<double>(s.dim) * nsec;
  std::vector<detail::SectorTrajectory<Dim>> traj(nsec);
  cd z{0.0, 0.0};
  for (int b = 0; b < nsec; ++b) {
    run_sector(s, b, traj[b]);
    z += (traj[b].forward.back().adjoint() * w).trace();
  }
  z /= full_dim;
  FidelityEvaluation out;
  out.fidelity = std::norm(z);
  if (with_gradient) {
    out.gradient.assign(controls.size(), 0.0);
    const Mat<Dim> w_dagger = w.adjoint();
    const cd weight = 2.0 * z / full_dim;
    for (int b = 0; b < nsec; ++b) {
      accumulate_gradient(s, b, traj[b], w_dagger, weight, GradientMethod::exact, out.gradient);
    }
  }
  return out;
}

}  // namespace

SectorOperator PropagationRecord::step(int n) const {
  if (n < 0 || n >= bins_) throw std::out_of_range("PropagationRecord::step: bin out of range");
  std::vector<Matrix> m;
  for (const auto& t : sectors_) m.push_back(t.step[n]);
  return {block_.num_center(), block_.num_boundary(), std::move(m)};
}

SectorOperator PropagationRecord::forward(int n) const {
  if (n < 0 || n >= bins_) throw std::out_of_range("PropagationRecord::forward: bin out of range");
  std::vector<Matrix> m;
  for (const auto& t : sectors_) m.push_back(t.forward[n]);
  return {block_.num_center(), block_.num_boundary(), std::move(m)};
}

SectorOperator PropagationRecord::backward(int n) const {
  if (n < 0 || n > bins_) throw std::out_of_range("PropagationRecord::backward: bin out of range");
  std::vector<Matrix> m;
  for (const auto& b : backward_) m.push_back(b[n]);
  return {block_.num_center(), block_.num_boundary(), std::move(m)};
}

PropagationRecord propagate(const Block& block, const ControlVector& controls, const ParameterPoint& params) {
  const SectorSetup<Eigen::Dynamic> s = make_setup<Eigen::Dynamic>(block, controls, params);
  PropagationRecord rec;
  rec.block_ = block;
  rec.controls_ = controls;
  rec.params_ = params;
  rec.bins_ = s.bins;
  const int nsec = 1 << s.num_boundary;
  rec.sectors_.resize(nsec);
  rec.backward_.resize(nsec);
  for (int b = 0; b < nsec; ++b) {
    run_sector(s, b, rec.sectors_[b]);
    auto& back = rec.backward_[b];
    back.assign(s.bins + 1, Matrix::Identity(s.dim, s.dim));
    for (int n = s.bins - 1; n >= 0; --n) back[n] = back[n + 1] * rec.sectors_[b].step[n];
  }
  return rec;
}

Matrix propagate_reference(const Block& block, const ControlVector& controls, const ParameterPoint& params) {
  const int dim = 1 << block.size();
  Matrix u = Matrix::Identity(dim, dim);
  for (int n = 0; n < controls.bins(); ++n) {
    const OperatorMatrix h = hamiltonian_slice(block, controls, params, n);
    u = evolution_operator(h, controls.time_step()) * u;
  }
  return u;
}

double fidelity(const Matrix& u_final, const TargetGate& target, const Block& block) {
  const Eigen::Index dim = Eigen::Index{1} << block.size();
  if (u_final.rows() != dim || u_final.cols() != dim) throw std::invalid_argument("fidelity: dimension mismatch");
  if (target.matrix.rows() != (Eigen::Index{1} << block.num_center())) {
    throw std::invalid_argument("fidelity: target does not act on the block center");
  }
  const Matrix full_target = kron(target.matrix, Matrix::Identity(Eigen::Index{1} << block.num_boundary(),
                                                                  Eigen::Index{1} << block.num_boundary()));
  const cd z = (u_final.adjoint() * full_target).trace() / static_cast<double>(dim);
  return std::norm(z);
}

double fidelity(const SectorOperator& u_final, const TargetGate& target) {
  const int dc = 1 << u_final.num_center();
  if (target.matrix.rows() != dc) throw std::invalid_argument("fidelity: target does not act on the block center");
  cd z{0.0, 0.0};
  for (int b = 0; b < u_final.sector_count(); ++b) z += (u_final.sector(b).adjoint() * target.matrix).trace();
  z /= static_cast<double>(dc) * u_final.sector_count();
  return std::norm(z);
}

std::vector<double> fidelity_gradient(const PropagationRecord& record, const TargetGate& target,
                                      GradientMethod method) {
  const SectorSetup<Eigen::Dynamic> s = make_setup<Eigen::Dynamic>(record.block_, record.controls_, record.params_);
  const Matrix w = target_matrix<Eigen::Dynamic>(target, s.dim);
  const int nsec = 1 << s.num_boundary;
  const double full_dim = static_cast<double>(s.dim) * nsec;
  cd z{0.0, 0.0};
  for (const auto& t : record.sectors_) z += (t.forward.back().adjoint() * w).trace();
  z /= full_dim;
  std::vector<double> grad(record.controls_.size(), 0.0);
  const Matrix w_dagger = w.adjoint();
  for (int b = 0; b < nsec; ++b) {
    accumulate_gradient(s, b, record.sectors_[b], w_dagger, 2.0 * z / full_dim, method, grad);
  }
  return grad;
}

FidelityEvaluation evaluate_fidelity(const Block& block, const ControlVector& controls, const ParameterPoint& params,
                                     const TargetGate& target, bool with_gradient) {
  switch (block.num_center()) {
    case 1: return evaluate_impl<2>(block, controls, params, target, with_gradient);
    case 2: return evaluate_impl<4>(block, controls, params, target, with_gradient);
    default: return evaluate_impl<Eigen::Dynamic>(block, controls, params, target, with_gradient);
  }
}

void apply_on_qubits(const Matrix& local, std::span<const int> qubits, int num_qubits, Matrix& target) {
  const int k = static_cast<int>(qubits.size());
  const Eigen::Index local_dim = Eigen::Index{1} << k;
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  if (local.rows() != local_dim || local.cols() != local_dim) throw std::invalid_argument("apply_on_qubits: bad size");
  if (target.rows() != dim) throw std::invalid_argument("apply_on_qubits: target dimension mismatch");
  std::vector<Eigen::Index> masks(k);
  Eigen::Index all = 0;
  for (int a = 0; a < k; ++a) {
    if (qubits[a] < 0 || qubits[a] >= num_qubits) throw std::out_of_range("apply_on_qubits: bad qubit");
    masks[a] = static_cast<Eigen::Index>(qubit_mask(num_qubits, qubits[a]));
    all |= masks[a];
  }
  std::vector<Eigen::Index> offsets(local_dim);
  for (Eigen::Index l = 0; l < local_dim; ++l) {
    Eigen::Index off = 0;
    for (int a = 0; a < k; ++a) {
      if (l & (Eigen::Index{1} << (k - 1 - a))) off |= masks[a];
    }
    offsets[l] = off;
  }
  Vector gathered(local_dim);
  for (Eigen::Index col = 0; col < target.cols(); ++col) {
    for (Eigen::Index rest = 0; rest < dim; ++rest) {
      if (rest & all) continue;
      for (Eigen::Index l = 0; l < local_dim; ++l) gathered(l) = target(rest | offsets[l], col);
      const Vector out = local * gathered;
      for (Eigen::Index l = 0; l < local_dim; ++l) target(rest | offsets[l], col) = out(l);
    }
  }
}

namespace {

void check_array_inputs(const QubitGraph& graph, const std::vector<Block>& blocks,
                        std::span<const ControlVector> block_controls) {
  if (graph.num_qubits() > kMaxArrayQubits) {
    throw std::invalid_argument("array evolution is limited to " + std::to_string(kMaxArrayQubits) + " qubits");
  }
  if (block_controls.size() != blocks.size()) {
    throw std::invalid_argument("expected one control vector per block (" + std::to_string(blocks.size()) + ")");
  }
  for (std::size_t k = 1; k < block_controls.size(); ++k) {
    if (block_controls[k].bins() != block_controls[0].bins() ||
        block_controls[k].duration() != block_controls[0].duration()) {
      throw std::invalid_argument("all block controls must share duration and bin count");
    }
  }
}

}  // namespace

Matrix evolve_array(const QubitGraph& graph, const DrivingPattern& pattern, std::span<const ControlVector> block_controls,
                    const ArrayParameters& params) {
  const std::vector<Block> blocks = decompose_blocks(graph, pattern);
  check_array_inputs(graph, blocks, block_controls);
  const int n = graph.num_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (blocks.empty()) {
    // Valid patterns always drive something; nothing to slice without controls.
    throw std::invalid_argument("evolve_array: pattern drives no qubits");
  }
  const int bins = block_controls[0].bins();
  const double dt = block_controls[0].time_step();

  std::vector<OperatorMatrix> slices;
  slices.reserve(bins);
  for (int bin = 0; bin < bins; ++bin) {
    OperatorBuilder b(n);
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
      b.add_zz(params.couplings.at(e), graph.edges()[e].a, graph.edges()[e].b);
    }
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      for (int j = 0; j < blocks[k].num_center(); ++j) {
        const int q = blocks[k].center[j];
        const RotatedEnvelope env = envelope_at_bin(block_controls[k], j, bin, params.detunings.at(q));
        const double scale = 0.5 * params.amplitude_scales.at(q);
        b.add_pauli(scale * env.in_phase, q, Axis::x);
        b.add_pauli(scale * env.quadrature, q, Axis::y);
      }
    }
    slices.push_back(b.build());
  }

  if (!slices.front().is_sparse()) {
    Matrix u = Matrix::Identity(dim, dim);
    for (const auto& h : slices) u = expm(cd{0.0, -dt} * h.dense()) * u;
    return u;
  }
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& h : slices) u = expm_multiply(h, u, dt);
  return u;
}

Matrix block_product_evolution(const QubitGraph& graph, const DrivingPattern& pattern,
                               std::span<const ControlVector> block_controls, const ArrayParameters& params) {
  const std::vector<Block> blocks = decompose_blocks(graph, pattern);
  check_array_inputs(graph, blocks, block_controls);
  const int n = graph.num_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix u = Matrix::Identity(dim, dim);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ParameterPoint p = block_parameters(graph, blocks[k], params);
    const Matrix local = propagate(blocks[k], block_controls[k], p).final_unitary().to_dense();
    std::vector<int> qubits;
    for (int l = 0; l < blocks[k].size(); ++l) qubits.push_back(blocks[k].global_qubit(l));
    apply_on_qubits(local, qubits, n, u);
  }
  return u;
}

std::vector<std::pair<int, int>> overlapping_block_pairs(const std::vector<Block>& blocks) {
  std::vector<std::pair<int, int>> out;
  auto touches = [](const Block& a, const Block& b) {
    for (int q : a.center) {
      if (b.local_index(q)) return true;
    }
    return false;
  };
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      if (touches(blocks[a], blocks[b]) || touches(blocks[b], blocks[a])) {
        out.emplace_back(static_cast<int>(a), static_cast<int>(b));
      }
    }
  }
  return out;
}

double max_block_commutator(const QubitGraph& graph, const DrivingPattern& pattern,
                            std::span<const ControlVector> block_controls, const ArrayParameters& params) {
  const std::vector<Block> blocks = decompose_blocks(graph, pattern);
  check_array_inputs(graph, blocks, block_controls);
  if (blocks.size() < 2) return 0.0;
  std::vector<ParameterPoint> points;
  for (const auto& b : blocks) points.push_back(block_parameters(graph, b, params));
  double worst = 0.0;
  for (int bin = 0; bin < block_controls[0].bins(); ++bin) {
    std::vector<SparseMatrix> hs;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const OperatorMatrix h = embedded_block_hamiltonian(graph, blocks[k], block_controls[k], points[k], bin);
      hs.push_back(h.is_sparse() ? h.sparse() : SparseMatrix(h.dense().sparseView()));
    }
    for (std::size_t a = 0; a < hs.size(); ++a) {
      for (std::size_t b = a + 1; b < hs.size(); ++b) {
        const SparseMatrix comm = SparseMatrix(hs[a] * hs[b]) - SparseMatrix(hs[b] * hs[a]);
        for (int k = 0; k < comm.outerSize(); ++k) {
          for (SparseMatrix::InnerIterator it(comm, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
        }
      }
    }
  }
  return worst;
}

double readout_invariance_check(const Vector& state, const QubitGraph& graph, double t) {
  const Eigen::Index dim = Eigen::Index{1} << graph.num_qubits();
  if (state.size() != dim) throw std::invalid_argument("readout_invariance_check: state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("readout_invariance_check: state is not normalized");
  }
  OperatorBuilder b(graph.num_qubits());
  for (const auto& e : graph.edges()) b.add_zz(e.coupling, e.a, e.b);
  // The drift is a sum of ZZ terms, hence diagonal: evolution is a phase per basis state.
  const auto& diag = b.diagonal();
  double drift = 0.0;
  for (Eigen::Index s = 0; s < dim; ++s) {
    const cd evolved = std::exp(cd{0.0, -t} * diag[s]) * state(s);
    drift = std::max(drift, std::abs(std::norm(evolved) - std::norm(state(s))));
  }
  return drift;
}

}  // namespace zzp
