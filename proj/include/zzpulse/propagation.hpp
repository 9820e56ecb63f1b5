#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zzpulse/hamiltonian.hpp"
#include "zzpulse/lattice.hpp"
#include "zzpulse/operators.hpp"

namespace zzp {

/// Target unitary U_C on the driven center of a block.
struct TargetGate {
  std::string label;
  Matrix matrix;

  int num_qubits() const;
};

/// H, T (pi/8), S, X, Y, Z, I, CNOT (alias CX), CZ, SWAP, I2.
TargetGate target_from_label(const std::string& label);
bool is_known_gate(const std::string& label);
/// Tensor product, first factor on the most significant qubits.
TargetGate tensor_product(const std::vector<TargetGate>& factors);

/// Operator on a block space that is block diagonal over boundary
/// configurations: sector b holds the action on the center when the
/// boundary is in computational basis state b.
class SectorOperator {
 public:
  SectorOperator(int num_center, int num_boundary, std::vector<Matrix> sectors);

  int num_center() const { return num_center_; }
  int num_boundary() const { return num_boundary_; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  const Matrix& sector(int b) const { return sectors_.at(b); }

  /// Full matrix in the block basis (center qubits most significant).
  Matrix to_dense() const;

 private:
  int num_center_;
  int num_boundary_;
  std::vector<Matrix> sectors_;
};

namespace detail {

/// Per-sector propagation data; Dim is the center dimension 2^|C|.
template <int Dim>
struct SectorTrajectory {
  using Mat = Eigen::Matrix<cd, Dim, Dim>;
  using RealVec = Eigen::Matrix<double, Dim, 1>;
  std::vector<Mat> step;     // U_n
  std::vector<Mat> forward;  // U_n ... U_0
  std::vector<Mat> eigvecs;  // H_n = V diag(lambda) V^dagger
  std::vector<RealVec> eigvals;
};

}  // namespace detail

enum class GradientMethod {
  exact,         // Frechet derivative of each slice exponential
  second_order,  // {-i dt K + dt^2/2 [H, K]} U_n
};

/// Piecewise-constant propagation of one block. Bins are 0-based:
/// forward(n) = U_n ... U_0 and backward(n) = U_{M-1} ... U_n, so
/// backward(n + 1) * forward(n) = final_unitary() and backward(M) = I.
class PropagationRecord {
 public:
  int bins() const { return bins_; }
  const Block& block() const { return block_; }
  const ControlVector& controls() const { return controls_; }
  const ParameterPoint& params() const { return params_; }

  SectorOperator step(int n) const;
  SectorOperator forward(int n) const;
  SectorOperator backward(int n) const;
  SectorOperator final_unitary() const { return forward(bins_ - 1); }

 private:
  friend PropagationRecord propagate(const Block&, const ControlVector&, const ParameterPoint&);
  friend std::vector<double> fidelity_gradient(const PropagationRecord&, const TargetGate&, GradientMethod);

  Block block_;
  ControlVector controls_;
  ParameterPoint params_;
  int bins_ = 0;
  std::vector<detail::SectorTrajectory<Eigen::Dynamic>> sectors_;
  std::vector<std::vector<Matrix>> backward_;  // [sector][n], n = 0..M
};

PropagationRecord propagate(const Block& block, const ControlVector& controls, const ParameterPoint& params);

/// Full-space propagation from hamiltonian_slice: dense Pade exponentials
/// below the sparse threshold, Lanczos columns above it. Test oracle.
Matrix propagate_reference(const Block& block, const ControlVector& controls, const ParameterPoint& params);

/// |tr[U^dagger (U_C x I_B)] / D|^2.
double fidelity(const Matrix& u_final, const TargetGate& target, const Block& block);
double fidelity(const SectorOperator& u_final, const TargetGate& target);

/// Gradient of the trace fidelity over the flat control layout.
std::vector<double> fidelity_gradient(const PropagationRecord& record, const TargetGate& target,
                                      GradientMethod method = GradientMethod::exact);

struct FidelityEvaluation {
  double fidelity = 0.0;
  std::vector<double> gradient;  // empty unless requested
};

/// Fidelity (and optionally its exact gradient) without materializing a
/// record; fixed-size kernels for one- and two-qubit centers.
FidelityEvaluation evaluate_fidelity(const Block& block, const ControlVector& controls, const ParameterPoint& params,
                                     const TargetGate& target, bool with_gradient);

inline constexpr int kMaxArrayQubits = 12;

/// Evolution of the undecomposed array Hamiltonian with the same slicing.
/// `block_controls` is aligned with decompose_blocks(graph, pattern).
Matrix evolve_array(const QubitGraph& graph, const DrivingPattern& pattern, std::span<const ControlVector> block_controls,
                    const ArrayParameters& params);

/// Ordered product of per-block propagators embedded in the array space.
Matrix block_product_evolution(const QubitGraph& graph, const DrivingPattern& pattern,
                               std::span<const ControlVector> block_controls, const ArrayParameters& params);

/// Pairs (a, b), a < b, of blocks whose Hamiltonians need not commute
/// because the center of one touches the qubits of the other.
std::vector<std::pair<int, int>> overlapping_block_pairs(const std::vector<Block>& blocks);

/// Largest entry of [H_a(bin), H_b(bin)] over all block pairs and bins, with
/// the embedded array operators built explicitly.
double max_block_commutator(const QubitGraph& graph, const DrivingPattern& pattern,
                            std::span<const ControlVector> block_controls, const ArrayParameters& params);

/// Left-multiplies `target` by `local` acting on `qubits` (first listed is
/// the most significant local qubit) of an n-qubit space.
void apply_on_qubits(const Matrix& local, std::span<const int> qubits, int num_qubits, Matrix& target);

/// Largest change of any computational-basis probability after evolving
/// `state` for time t under the drift sum J Z Z of the graph.
double readout_invariance_check(const Vector& state, const QubitGraph& graph, double t);

}  // namespace zzp
