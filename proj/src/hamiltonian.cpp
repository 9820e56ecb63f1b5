#include "zzpulse/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zzp {

ParameterPoint nominal_parameters(const Block& block) {
  ParameterPoint p;
  for (const auto& c : block.couplings) p.couplings.push_back(c.coupling);
  p.amplitude_scales.assign(block.center.size(), 1.0);
  p.detunings.assign(block.center.size(), 0.0);
  return p;
}

void check_parameters(const Block& block, const ParameterPoint& params) {
  if (params.couplings.size() != block.couplings.size()) {
    throw std::invalid_argument("parameter point has " + std::to_string(params.couplings.size()) +
                                " couplings, block needs " + std::to_string(block.couplings.size()));
  }
  if (params.amplitude_scales.size() != block.center.size() || params.detunings.size() != block.center.size()) {
    throw std::invalid_argument("parameter point does not cover the block center");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(params.couplings.begin(), params.couplings.end(), finite) ||
      !std::all_of(params.detunings.begin(), params.detunings.end(), finite)) {
    throw std::invalid_argument("parameter point has non-finite values");
  }
  for (double a : params.amplitude_scales) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("amplitude scale must be positive and finite");
  }
}

ControlVector::ControlVector(double duration, int bins, int channels)
    : ControlVector(duration, bins, channels, std::vector<double>(2 * static_cast<std::size_t>(bins) * channels, 0.0)) {}

ControlVector::ControlVector(double duration, int bins, int channels, std::vector<double> values)
    : duration_(duration), bins_(bins), channels_(channels), values_(std::move(values)) {
  if (bins < 1) throw std::invalid_argument("ControlVector: need at least one bin");
  if (channels < 0) throw std::invalid_argument("ControlVector: negative channel count");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("ControlVector: duration must be > 0");
  if (values_.size() != 2 * static_cast<std::size_t>(bins) * channels) {
    throw std::invalid_argument("ControlVector: expected " + std::to_string(2 * bins * channels) + " values, got " +
                                std::to_string(values_.size()));
  }
}

double ControlVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

RotatedEnvelope envelope_at_bin(const ControlVector& controls, int channel, int bin, double detuning) {
  if (bin < 0 || bin >= controls.bins() || channel < 0 || channel >= controls.channels()) {
    throw std::out_of_range("envelope_at_bin: index out of range");
  }
  const double phase = detuning * controls.midpoint(bin);
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  const double ox = controls.at(channel, bin, Quadrature::x);
  const double oy = controls.at(channel, bin, Quadrature::y);
  return {ox * c + oy * s, oy * c - ox * s};
}

namespace {

void check_controls(const Block& block, const ControlVector& controls) {
  if (controls.channels() != block.num_center()) {
    throw std::invalid_argument("control vector has " + std::to_string(controls.channels()) +
                                " channels, block center has " + std::to_string(block.num_center()));
  }
}

void add_drift(OperatorBuilder& b, const Block& block, const ParameterPoint& params, auto&& local_to_qubit) {
  for (std::size_t e = 0; e < block.couplings.size(); ++e) {
    const auto& c = block.couplings[e];
    b.add_zz(params.couplings[e], local_to_qubit(c.i), local_to_qubit(c.j));
  }
}

void add_drive(OperatorBuilder& b, const Block& block, const ControlVector& controls, const ParameterPoint& params,
               int bin, auto&& local_to_qubit) {
  for (int j = 0; j < block.num_center(); ++j) {
    const RotatedEnvelope env = envelope_at_bin(controls, j, bin, params.detunings[j]);
    const double scale = 0.5 * params.amplitude_scales[j];
    b.add_pauli(scale * env.in_phase, local_to_qubit(j), Axis::x);
    b.add_pauli(scale * env.quadrature, local_to_qubit(j), Axis::y);
  }
}

}  // namespace

OperatorMatrix drift_operator(const Block& block, const ParameterPoint& params) {
  check_parameters(block, params);
  OperatorBuilder b(block.size());
  add_drift(b, block, params, [](int k) { return k; });
  return b.build();
}

OperatorMatrix hamiltonian_slice(const Block& block, const ControlVector& controls, const ParameterPoint& params,
                                 int bin) {
  check_parameters(block, params);
  check_controls(block, controls);
  OperatorBuilder b(block.size());
  add_drift(b, block, params, [](int k) { return k; });
  add_drive(b, block, controls, params, bin, [](int k) { return k; });
  return b.build();
}

std::pair<OperatorMatrix, OperatorMatrix> control_operator(const Block& block, const ControlVector& controls,
                                                           const ParameterPoint& params, int channel, int bin) {
  check_parameters(block, params);
  check_controls(block, controls);
  if (channel < 0 || channel >= block.num_center()) throw std::out_of_range("control_operator: channel not in center");
  if (bin < 0 || bin >= controls.bins()) throw std::out_of_range("control_operator: bin out of range");
  const double phase = params.detunings[channel] * controls.midpoint(bin);
  const double half_alpha = 0.5 * params.amplitude_scales[channel];
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  OperatorBuilder kx(block.size());
  kx.add_pauli(half_alpha * c, channel, Axis::x).add_pauli(-half_alpha * s, channel, Axis::y);
  OperatorBuilder ky(block.size());
  ky.add_pauli(half_alpha * c, channel, Axis::y).add_pauli(half_alpha * s, channel, Axis::x);
  return {kx.build(), ky.build()};
}

ArrayParameters nominal_array_parameters(const QubitGraph& graph) {
  ArrayParameters p;
  for (const auto& e : graph.edges()) p.couplings.push_back(e.coupling);
  p.amplitude_scales.assign(graph.num_qubits(), 1.0);
  p.detunings.assign(graph.num_qubits(), 0.0);
  return p;
}

ParameterPoint block_parameters(const QubitGraph& graph, const Block& block, const ArrayParameters& params) {
  if (params.couplings.size() != graph.edges().size() ||
      params.amplitude_scales.size() != static_cast<std::size_t>(graph.num_qubits()) ||
      params.detunings.size() != static_cast<std::size_t>(graph.num_qubits())) {
    throw std::invalid_argument("array parameters do not match the graph");
  }
  ParameterPoint p;
  for (const auto& c : block.couplings) {
    const auto e = graph.edge_index(block.global_qubit(c.i), block.global_qubit(c.j));
    if (!e) throw std::invalid_argument("block coupling is not a graph edge");
    p.couplings.push_back(params.couplings[*e]);
  }
  for (int q : block.center) {
    p.amplitude_scales.push_back(params.amplitude_scales[q]);
    p.detunings.push_back(params.detunings[q]);
  }
  return p;
}

OperatorMatrix embedded_block_hamiltonian(const QubitGraph& graph, const Block& block, const ControlVector& controls,
                                          const ParameterPoint& params, int bin) {
  check_parameters(block, params);
  check_controls(block, controls);
  OperatorBuilder b(graph.num_qubits());
  auto to_global = [&](int k) { return block.global_qubit(k); };
  add_drift(b, block, params, to_global);
  add_drive(b, block, controls, params, bin, to_global);
  return b.build();
}

}  // namespace zzp
