#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "zzpulse/hamiltonian.hpp"
#include "zzpulse/lattice.hpp"
#include "zzpulse/propagation.hpp"
#include "zzpulse/robust.hpp"

namespace zzp {

struct Instruction {
  std::string label;
  std::vector<int> qubits;  // control first for CNOT
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Circuit {
  std::vector<Instruction> gates;
};

/// One instruction per line, e.g. `CNOT 5 6`; `#` starts a comment.
Circuit parse_circuit(std::string_view text);
std::string format_circuit(const Circuit& circuit);

/// Throws std::invalid_argument on unknown gates, wrong arity, repeated or
/// out-of-range qubits, or two-qubit gates off the graph edges.
void check_circuit(const Circuit& circuit, const QubitGraph& graph);

/// Layers of the as-soon-as-possible layering.
int circuit_depth(const Circuit& circuit);

/// Ideal unitary of the whole circuit on `num_qubits` qubits.
Matrix circuit_unitary(const Circuit& circuit, int num_qubits);

/// Driven block and the gate its pulse must implement on the center.
struct BlockTask {
  Block block;
  TargetGate target;
  std::vector<int> instructions;  // indices into Circuit::gates
};

struct ScheduleStep {
  DrivingPattern pattern;
  std::vector<BlockTask> tasks;  // aligned with decompose_blocks(graph, pattern)
};

struct Schedule {
  std::vector<ScheduleStep> steps;
  int circuit_depth = 0;

  int step_count() const { return static_cast<int>(steps.size()); }
};

/// Target of a block carrying `instructions`. Idle blocks get the direct
/// identity "I"; a single gate exactly on the center keeps its label.
TargetGate block_target(const Block& block, const Circuit& circuit, const std::vector<int>& instructions);

/// Greedy earliest-step layering; two-qubit gates choose the pattern first.
Schedule compile(const Circuit& circuit, const QubitGraph& graph);

struct ScheduleReport {
  std::vector<std::string> pattern_issues;
  std::vector<std::string> coverage_issues;
  int step_count = 0;
  int circuit_depth = 0;
  double overhead = 1.0;       // step_count / circuit_depth
  bool overhead_flag = false;  // overhead above 2

  bool valid() const { return pattern_issues.empty() && coverage_issues.empty(); }
};

ScheduleReport verify_schedule(const Schedule& schedule, const Circuit& circuit, const QubitGraph& graph);

/// Congruence class of a block: center couplings plus the sorted multiset of
/// boundary coupling profiles. Boundary order does not affect the pulse.
struct BlockShape {
  int num_center = 0;
  int num_boundary = 0;
  std::vector<long long> center_couplings;            // upper triangle, scaled by 1e9
  std::vector<std::vector<long long>> boundary_profiles;

  std::string describe() const;
  friend auto operator<=>(const BlockShape&, const BlockShape&) = default;
};

BlockShape block_shape(const Block& block);

class PulseLibrary {
 public:
  void add(const std::string& label, const BlockShape& shape, ControlVector controls);
  bool contains(const std::string& label, const BlockShape& shape) const;
  const ControlVector& lookup(const std::string& label, const BlockShape& shape) const;
  std::size_t size() const { return pulses_.size(); }
  const std::map<std::pair<std::string, BlockShape>, ControlVector>& entries() const { return pulses_; }

 private:
  std::map<std::pair<std::string, BlockShape>, ControlVector> pulses_;
};

/// Optimizes one pulse per distinct (target, shape) used by `schedule`.
/// `progress` is told each (label, shape, worst-case infidelity) as it finishes.
PulseLibrary build_pulse_library(
    const Schedule& schedule, const OptimizationConfig& config, const UncertaintySpec& spec,
    const std::function<void(const std::string&, const BlockShape&, double)>& progress = {});

/// Product of evolve_array over the steps (at most kMaxArrayQubits qubits).
Matrix simulate_schedule(const Schedule& schedule, const QubitGraph& graph, const PulseLibrary& library,
                         const ArrayParameters& params);

/// |tr(V^dagger U)|^2 / D^2.
double process_fidelity(const Matrix& u, const Matrix& v);

}  // namespace zzp
