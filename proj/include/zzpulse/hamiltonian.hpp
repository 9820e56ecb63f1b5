#pragma once

#include <utility>
#include <vector>

#include "zzpulse/lattice.hpp"
#include "zzpulse/operators.hpp"

namespace zzp {

/// One realization of the uncertain block parameters. Vectors are aligned
/// with Block::couplings and Block::center respectively.
struct ParameterPoint {
  std::vector<double> couplings;         // J_jk
  std::vector<double> amplitude_scales;  // alpha_j
  std::vector<double> detunings;         // delta_j
};

ParameterPoint nominal_parameters(const Block& block);

/// Throws std::invalid_argument unless `params` matches `block`.
void check_parameters(const Block& block, const ParameterPoint& params);

enum class Quadrature { x = 0, y = 1 };

/// Piecewise-constant Rabi envelopes Omega^{x,y}_{jn}. Bins are 0-based; bin n
/// covers [n dt, (n + 1) dt). Flat layout is channel-major, then bin, then
/// quadrature.
class ControlVector {
 public:
  ControlVector() = default;
  ControlVector(double duration, int bins, int channels);
  ControlVector(double duration, int bins, int channels, std::vector<double> values);

  double duration() const { return duration_; }
  int bins() const { return bins_; }
  int channels() const { return channels_; }
  double time_step() const { return duration_ / bins_; }
  double midpoint(int n) const { return (n + 0.5) * time_step(); }

  std::size_t size() const { return values_.size(); }
  static std::size_t flat_index(int bins, int channel, int bin, Quadrature q) {
    return (static_cast<std::size_t>(channel) * bins + bin) * 2 + static_cast<std::size_t>(q);
  }
  double& at(int channel, int bin, Quadrature q) { return values_[flat_index(bins_, channel, bin, q)]; }
  double at(int channel, int bin, Quadrature q) const { return values_[flat_index(bins_, channel, bin, q)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double max_abs() const;

 private:
  double duration_ = 0.0;
  int bins_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

/// Rotated quadratures (Omega_jn, Omega'_jn) at the bin midpoint.
struct RotatedEnvelope {
  double in_phase = 0.0;
  double quadrature = 0.0;
};

RotatedEnvelope envelope_at_bin(const ControlVector& controls, int channel, int bin, double detuning);

/// sum J_jk Z_j Z_k over the block couplings.
OperatorMatrix drift_operator(const Block& block, const ParameterPoint& params);

/// H_{G,n} = sum_j (alpha_j / 2)[Omega_jn X_j + Omega'_jn Y_j] + sum J_jk Z_j Z_k.
OperatorMatrix hamiltonian_slice(const Block& block, const ControlVector& controls, const ParameterPoint& params,
                                 int bin);

/// dH_{G,n}/dOmega^x_{jn} and dH_{G,n}/dOmega^y_{jn}.
std::pair<OperatorMatrix, OperatorMatrix> control_operator(const Block& block, const ControlVector& controls,
                                                           const ParameterPoint& params, int channel, int bin);

/// Whole-array parameters: per-edge couplings (graph edge order) and
/// per-qubit amplitude scales and detunings.
struct ArrayParameters {
  std::vector<double> couplings;
  std::vector<double> amplitude_scales;
  std::vector<double> detunings;
};

ArrayParameters nominal_array_parameters(const QubitGraph& graph);

/// Restriction of array parameters to one block.
ParameterPoint block_parameters(const QubitGraph& graph, const Block& block, const ArrayParameters& params);

/// Block Hamiltonian at `bin`, embedded in the full array space (qubit q of
/// the graph is qubit q of the operator).
OperatorMatrix embedded_block_hamiltonian(const QubitGraph& graph, const Block& block, const ControlVector& controls,
                                          const ParameterPoint& params, int bin);

}  // namespace zzp
