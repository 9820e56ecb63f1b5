#include "zzpulse/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace zzp {

void SpectroscopyCluster::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(frequencies.begin(), frequencies.end(), finite) ||
      !std::all_of(target_couplings.begin(), target_couplings.end(), finite)) {
    throw std::invalid_argument("spectroscopy cluster: non-finite frequency or coupling");
  }
  for (const auto& f : fringe_couplings) {
    if (!std::all_of(f.begin(), f.end(), finite)) throw std::invalid_argument("spectroscopy cluster: non-finite fringe");
  }
}

SpectroscopyCluster make_cluster(const QubitGraph& graph, const std::vector<double>& frequencies, int target) {
  if (static_cast<int>(frequencies.size()) != graph.num_qubits()) {
    throw std::invalid_argument("make_cluster: need one frequency per qubit");
  }
  if (target < 0 || target >= graph.num_qubits()) throw std::invalid_argument("make_cluster: target out of range");
  const auto& nb = graph.neighbors(target);
  if (nb.size() != 3) {
    throw std::invalid_argument("make_cluster: target " + std::to_string(target) + " has degree " +
                                std::to_string(nb.size()) + ", the recovery needs degree 3");
  }
  SpectroscopyCluster c;
  c.qubits[0] = target;
  c.frequencies[0] = frequencies[target];
  for (int j = 0; j < 3; ++j) {
    const int q = nb[j];
    c.qubits[j + 1] = q;
    c.frequencies[j + 1] = frequencies[q];
    c.target_couplings[j] = graph.coupling(target, q);
    for (int k : graph.neighbors(q)) {
      if (k == target) continue;
      if (std::find(nb.begin(), nb.end(), k) != nb.end()) {
        throw std::invalid_argument("make_cluster: neighbors of the target are coupled to each other");
      }
      c.fringe_couplings[j].push_back(graph.coupling(q, k));
    }
  }
  return c;
}

std::array<double, 4> predict_one_photon_peaks(const SpectroscopyCluster& c) {
  c.validate();
  std::array<double, 4> p{};
  p[0] = c.frequencies[0] - 2.0 * (c.target_couplings[0] + c.target_couplings[1] + c.target_couplings[2]);
  for (int j = 0; j < 3; ++j) {
    const double fringe = std::accumulate(c.fringe_couplings[j].begin(), c.fringe_couplings[j].end(), 0.0);
    p[j + 1] = c.frequencies[j + 1] - 2.0 * c.target_couplings[j] - 2.0 * fringe;
  }
  return p;
}

std::array<double, 3> predict_two_photon_peaks(const SpectroscopyCluster& c) {
  c.validate();
  std::array<double, 3> p{};
  for (int j = 0; j < 3; ++j) {
    // The 1-j bond is flipped twice and keeps its energy.
    double shifted = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (k != j) shifted += c.target_couplings[k];
    }
    shifted += std::accumulate(c.fringe_couplings[j].begin(), c.fringe_couplings[j].end(), 0.0);
    p[j] = 0.5 * (c.frequencies[0] + c.frequencies[j + 1] - 2.0 * shifted);
  }
  return p;
}

PeakSet predict_peaks(const SpectroscopyCluster& cluster) {
  return {predict_one_photon_peaks(cluster), predict_two_photon_peaks(cluster)};
}

double recover_frequency(const PeakSet& peaks) {
  const double two = peaks.two_photon[0] + peaks.two_photon[1] + peaks.two_photon[2];
  const double one = peaks.one_photon[0] + peaks.one_photon[1] + peaks.one_photon[2] + peaks.one_photon[3];
  return two - 0.5 * one;
}

PeakSet oracle_peaks(const SpectroscopyCluster& c) {
  c.validate();
  // Qubit 0 is the target, 1..3 its neighbors, then one qubit per fringe bond.
  struct Bond {
    int a, b;
    double j;
  };
  std::vector<Bond> bonds;
  int n = 4;
  for (int j = 0; j < 3; ++j) {
    bonds.push_back({0, j + 1, c.target_couplings[j]});
    for (double jf : c.fringe_couplings[j]) bonds.push_back({j + 1, n++, jf});
  }
  if (n > kMaxOracleQubits) {
    throw std::invalid_argument("oracle_peaks: " + std::to_string(n) + " qubits exceeds " +
                                std::to_string(kMaxOracleQubits));
  }
  std::vector<double> omega(n, 0.0);
  std::copy(c.frequencies.begin(), c.frequencies.end(), omega.begin());

  // Qubit q is bit q of the configuration index; a set bit is |1>, Z = -1.
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> energy(dim, 0.0);
  for (std::size_t s = 0; s < dim; ++s) {
    auto z = [s](int q) { return (s >> q) & 1u ? -1.0 : 1.0; };
    double e = 0.0;
    for (int q = 0; q < n; ++q) e -= 0.5 * omega[q] * z(q);
    for (const Bond& b : bonds) e += b.j * z(b.a) * z(b.b);
    energy[s] = e;
  }
  PeakSet p;
  for (int j = 0; j < 4; ++j) p.one_photon[j] = energy[std::size_t{1} << j] - energy[0];
  for (int j = 0; j < 3; ++j) p.two_photon[j] = 0.5 * (energy[1u | (std::size_t{1} << (j + 1))] - energy[0]);
  return p;
}

}  // namespace zzp
