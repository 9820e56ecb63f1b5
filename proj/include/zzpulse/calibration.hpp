#pragma once

#include <array>
#include <vector>

#include "zzpulse/lattice.hpp"

namespace zzp {

/// Target qubit 1 with its three neighbors 2..4 and the couplings of those
/// neighbors to the rest of the array (the fringe). Fringe frequencies do
/// not enter the peak positions and are not stored.
struct SpectroscopyCluster {
  std::array<int, 4> qubits{};             // graph indices of qubits 1..4
  std::array<double, 4> frequencies{};     // omega_1..omega_4
  std::array<double, 3> target_couplings{};  // J_12, J_13, J_14
  std::array<std::vector<double>, 3> fringe_couplings;  // J_jk, k in NB_j \ {1}

  void validate() const;
};

/// Cluster around `target` of an array with bare frequencies `frequencies`
/// (one per qubit). The target must have degree 3 and its neighbors must not
/// be coupled to each other.
SpectroscopyCluster make_cluster(const QubitGraph& graph, const std::vector<double>& frequencies, int target);

struct PeakSet {
  std::array<double, 4> one_photon{};  // omega^p_j, j = 1..4
  std::array<double, 3> two_photon{};  // omega^p_1j, j = 2..4
};

std::array<double, 4> predict_one_photon_peaks(const SpectroscopyCluster& cluster);
std::array<double, 3> predict_two_photon_peaks(const SpectroscopyCluster& cluster);
PeakSet predict_peaks(const SpectroscopyCluster& cluster);

/// sum_j omega^p_1j - (1/2) sum_j omega^p_j.
double recover_frequency(const PeakSet& peaks);

inline constexpr int kMaxOracleQubits = 14;

/// Peaks as energy differences of -sum omega Z / 2 + sum J Z Z between
/// |0...0> and the flipped configurations, evaluated on the full diagonal.
PeakSet oracle_peaks(const SpectroscopyCluster& cluster);

}  // namespace zzp
