#include "zzpulse/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace zzp {

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    Instruction ins;
    if (!(words >> ins.label)) continue;
    std::string tok;
    while (words >> tok) {
      try {
        std::size_t used = 0;
        const int q = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        ins.qubits.push_back(q);
      } catch (const std::exception&) {
        throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": bad qubit index '" + tok + "'");
      }
    }
    if (ins.qubits.empty()) {
      throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": gate without qubits");
    }
    c.gates.push_back(std::move(ins));
  }
  return c;
}

std::string format_circuit(const Circuit& circuit) {
  std::ostringstream out;
  for (const auto& g : circuit.gates) {
    out << g.label;
    for (int q : g.qubits) out << ' ' << q;
    out << '\n';
  }
  return out.str();
}

void check_circuit(const Circuit& circuit, const QubitGraph& graph) {
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Instruction& g = circuit.gates[i];
    const std::string where = "gate " + std::to_string(i) + " (" + g.label + ")";
    if (!is_known_gate(g.label)) throw std::invalid_argument(where + ": unknown gate");
    if (target_from_label(g.label).num_qubits() != static_cast<int>(g.qubits.size())) {
      throw std::invalid_argument(where + ": wrong number of qubits");
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= graph.num_qubits()) throw std::invalid_argument(where + ": qubit out of range");
    }
    if (g.qubits.size() == 2) {
      if (g.qubits[0] == g.qubits[1]) throw std::invalid_argument(where + ": repeated qubit");
      if (!graph.has_edge(g.qubits[0], g.qubits[1])) {
        throw std::invalid_argument(where + ": qubits " + std::to_string(g.qubits[0]) + " and " +
                                    std::to_string(g.qubits[1]) + " are not coupled");
      }
    }
  }
}

namespace {

// Index of the previous gate touching each qubit of gate i.
std::vector<std::vector<int>> predecessors(const Circuit& circuit) {
  std::map<int, int> last;
  std::vector<std::vector<int>> pred(circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    for (int q : circuit.gates[i].qubits) {
      if (auto it = last.find(q); it != last.end()) pred[i].push_back(it->second);
      last[q] = static_cast<int>(i);
    }
  }
  return pred;
}

}  // namespace

int circuit_depth(const Circuit& circuit) {
  const auto pred = predecessors(circuit);
  std::vector<int> layer(circuit.gates.size(), 1);
  int depth = 0;
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    for (int p : pred[i]) layer[i] = std::max(layer[i], layer[p] + 1);
    depth = std::max(depth, layer[i]);
  }
  return depth;
}

Matrix circuit_unitary(const Circuit& circuit, int num_qubits) {
  Matrix u = Matrix::Identity(std::size_t{1} << num_qubits, std::size_t{1} << num_qubits);
  for (const auto& g : circuit.gates) apply_on_qubits(target_from_label(g.label).matrix, g.qubits, num_qubits, u);
  return u;
}

TargetGate block_target(const Block& block, const Circuit& circuit, const std::vector<int>& instructions) {
  const int nc = block.num_center();
  if (instructions.empty()) return {"I", Matrix::Identity(std::size_t{1} << nc, std::size_t{1} << nc)};
  if (instructions.size() == 1 && circuit.gates.at(instructions[0]).qubits == block.center) {
    return target_from_label(circuit.gates[instructions[0]].label);
  }
  TargetGate t{"", Matrix::Identity(std::size_t{1} << nc, std::size_t{1} << nc)};
  for (int idx : instructions) {
    const Instruction& g = circuit.gates.at(idx);
    std::vector<int> local;
    for (int q : g.qubits) {
      const auto pos = std::find(block.center.begin(), block.center.end(), q);
      if (pos == block.center.end()) {
        throw std::invalid_argument("block_target: qubit " + std::to_string(q) + " is not in the block center");
      }
      local.push_back(static_cast<int>(pos - block.center.begin()));
    }
    apply_on_qubits(target_from_label(g.label).matrix, local, nc, t.matrix);
    if (!t.label.empty()) t.label += ';';
    t.label += g.label + '@';
    for (std::size_t k = 0; k < local.size(); ++k) t.label += (k ? "," : "") + std::to_string(local[k]);
  }
  return t;
}

Schedule compile(const Circuit& circuit, const QubitGraph& graph) {
  check_circuit(circuit, graph);
  if (graph.geometry() == Geometry::custom || !graph.has_coords()) {
    throw std::invalid_argument("compile: needs a generated lattice geometry");
  }
  const auto pred = predecessors(circuit);
  const int n = static_cast<int>(circuit.gates.size());
  std::vector<int> step_of(n, -1);
  Schedule schedule;
  schedule.circuit_depth = circuit_depth(circuit);
  int last_color = -1;  // sublattice of the previous single-qubit step, -1 after a two-qubit step
  int placed = 0;
  while (placed < n) {
    const int step = schedule.step_count();
    std::vector<int> frontier;
    for (int i = 0; i < n; ++i) {
      if (step_of[i] >= 0) continue;
      const bool ready = std::all_of(pred[i].begin(), pred[i].end(), [&](int p) { return step_of[p] >= 0; });
      if (ready) frontier.push_back(i);
    }

    ScheduleStep s;
    const auto two = std::find_if(frontier.begin(), frontier.end(),
                                  [&](int i) { return circuit.gates[i].qubits.size() == 2; });
    if (two != frontier.end()) {
      const auto& q = circuit.gates[*two].qubits;
      s.pattern = two_qubit_pattern(graph, {q[0], q[1]});
      last_color = -1;
    } else {
      // Sublattice of the earliest ready gate, alternating when both have work.
      int color = graph.color(circuit.gates[frontier.front()].qubits[0]);
      if (color == last_color) {
        const bool other_has_work = std::any_of(frontier.begin(), frontier.end(), [&](int i) {
          return graph.color(circuit.gates[i].qubits[0]) != color;
        });
        if (other_has_work) color = 1 - color;
      }
      s.pattern = single_qubit_pattern(graph, color);
      last_color = color;
    }

    const auto blocks = decompose_blocks(graph, s.pattern);
    std::vector<std::vector<int>> assigned(blocks.size());
    std::vector<char> busy(graph.num_qubits(), 0);
    for (int i : frontier) {
      const auto& q = circuit.gates[i].qubits;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& center = blocks[b].center;
        const bool inside = std::all_of(q.begin(), q.end(), [&](int x) {
          return !busy[x] && std::find(center.begin(), center.end(), x) != center.end();
        });
        if (!inside) continue;
        assigned[b].push_back(i);
        for (int x : q) busy[x] = 1;
        step_of[i] = step;
        ++placed;
        break;
      }
    }
    if (std::none_of(assigned.begin(), assigned.end(), [](const auto& a) { return !a.empty(); })) {
      throw std::logic_error("compile: no gate fits the chosen pattern");
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      TargetGate t = block_target(blocks[b], circuit, assigned[b]);
      s.tasks.push_back({blocks[b], std::move(t), std::move(assigned[b])});
    }
    schedule.steps.push_back(std::move(s));
  }
  return schedule;
}

ScheduleReport verify_schedule(const Schedule& schedule, const Circuit& circuit, const QubitGraph& graph) {
  ScheduleReport r;
  r.step_count = schedule.step_count();
  r.circuit_depth = circuit_depth(circuit);
  r.overhead = r.circuit_depth > 0 ? static_cast<double>(r.step_count) / r.circuit_depth : (r.step_count ? INFINITY : 1.0);
  r.overhead_flag = r.overhead > 2.0;

  const int n = static_cast<int>(circuit.gates.size());
  std::vector<int> step_of(n, -1);
  for (int s = 0; s < schedule.step_count(); ++s) {
    const ScheduleStep& st = schedule.steps[s];
    const std::string tag = "step " + std::to_string(s) + ": ";
    const ValidationReport vr = validate_pattern(graph, st.pattern);
    for (const auto& v : vr.violations) r.pattern_issues.push_back(tag + v.describe());
    if (!vr.ok()) continue;
    const auto blocks = decompose_blocks(graph, st.pattern);
    if (blocks.size() != st.tasks.size()) {
      r.pattern_issues.push_back(tag + std::to_string(blocks.size()) + " driven blocks but " +
                                 std::to_string(st.tasks.size()) + " targets");
      continue;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const BlockTask& task = st.tasks[b];
      if (task.block.center != blocks[b].center || task.block.boundary != blocks[b].boundary) {
        r.pattern_issues.push_back(tag + "block " + std::to_string(b) + " does not match the pattern");
        continue;
      }
      for (int i : task.instructions) {
        if (i < 0 || i >= n) {
          r.coverage_issues.push_back(tag + "unknown instruction " + std::to_string(i));
          continue;
        }
        if (step_of[i] >= 0) r.coverage_issues.push_back(tag + "gate " + std::to_string(i) + " placed twice");
        step_of[i] = s;
      }
      try {
        const TargetGate expected = block_target(task.block, circuit, task.instructions);
        if (expected.matrix.rows() != task.target.matrix.rows() ||
            max_abs(expected.matrix - task.target.matrix) > 1e-12) {
          r.coverage_issues.push_back(tag + "block " + std::to_string(b) + " target does not match its gates");
        }
      } catch (const std::exception& e) {
        r.coverage_issues.push_back(tag + e.what());
      }
    }
  }
  const auto pred = predecessors(circuit);
  for (int i = 0; i < n; ++i) {
    if (step_of[i] < 0) {
      r.coverage_issues.push_back("gate " + std::to_string(i) + " (" + circuit.gates[i].label + ") never placed");
      continue;
    }
    for (int p : pred[i]) {
      if (step_of[p] >= 0 && step_of[p] >= step_of[i]) {
        r.coverage_issues.push_back("gate " + std::to_string(i) + " runs before its predecessor " + std::to_string(p));
      }
    }
  }
  return r;
}

namespace {

long long quantize(double j) { return std::llround(j * 1e9); }

}  // namespace

BlockShape block_shape(const Block& block) {
  BlockShape s;
  s.num_center = block.num_center();
  s.num_boundary = block.num_boundary();
  const int nc = s.num_center;
  std::vector<std::vector<long long>> center(nc, std::vector<long long>(nc, 0));
  s.boundary_profiles.assign(s.num_boundary, std::vector<long long>(nc, 0));
  for (const auto& c : block.couplings) {
    const int i = std::min(c.i, c.j), j = std::max(c.i, c.j);
    if (j < nc) center[i][j] = quantize(c.coupling);
    else if (i < nc) s.boundary_profiles[j - nc][i] = quantize(c.coupling);
  }
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) s.center_couplings.push_back(center[i][j]);
  std::sort(s.boundary_profiles.begin(), s.boundary_profiles.end());
  return s;
}

std::string BlockShape::describe() const {
  std::ostringstream out;
  out << num_center << "+" << num_boundary;
  if (!center_couplings.empty()) {
    out << " center[";
    for (std::size_t k = 0; k < center_couplings.size(); ++k) out << (k ? " " : "") << center_couplings[k] * 1e-9;
    out << "]";
  }
  out << " boundary[";
  for (std::size_t b = 0; b < boundary_profiles.size(); ++b) {
    out << (b ? " " : "") << "(";
    for (std::size_t k = 0; k < boundary_profiles[b].size(); ++k) out << (k ? "," : "") << boundary_profiles[b][k] * 1e-9;
    out << ")";
  }
  out << "]";
  return out.str();
}

void PulseLibrary::add(const std::string& label, const BlockShape& shape, ControlVector controls) {
  if (controls.channels() != shape.num_center) throw std::invalid_argument("PulseLibrary: channel count mismatch");
  pulses_.insert_or_assign({label, shape}, std::move(controls));
}

bool PulseLibrary::contains(const std::string& label, const BlockShape& shape) const {
  return pulses_.count({label, shape}) > 0;
}

const ControlVector& PulseLibrary::lookup(const std::string& label, const BlockShape& shape) const {
  const auto it = pulses_.find({label, shape});
  if (it == pulses_.end()) {
    throw std::out_of_range("pulse library has no pulse for " + label + " on block " + shape.describe());
  }
  return it->second;
}

PulseLibrary build_pulse_library(const Schedule& schedule, const OptimizationConfig& config,
                                 const UncertaintySpec& spec,
                                 const std::function<void(const std::string&, const BlockShape&, double)>& progress) {
  PulseLibrary lib;
  for (const auto& step : schedule.steps) {
    for (const auto& task : step.tasks) {
      const BlockShape shape = block_shape(task.block);
      if (lib.contains(task.target.label, shape)) continue;
      const OptimizationResult r = optimize(task.block, task.target, spec, config);
      if (progress) progress(task.target.label, shape, r.worst_infidelity());
      lib.add(task.target.label, shape, r.controls);
    }
  }
  return lib;
}

Matrix simulate_schedule(const Schedule& schedule, const QubitGraph& graph, const PulseLibrary& library,
                         const ArrayParameters& params) {
  if (graph.num_qubits() > kMaxArrayQubits) {
    throw std::invalid_argument("simulate_schedule: " + std::to_string(graph.num_qubits()) + " qubits exceeds " +
                                std::to_string(kMaxArrayQubits));
  }
  const std::size_t dim = std::size_t{1} << graph.num_qubits();
  Matrix total = Matrix::Identity(dim, dim);
  for (const auto& step : schedule.steps) {
    std::vector<ControlVector> controls;
    for (const auto& task : step.tasks) controls.push_back(library.lookup(task.target.label, block_shape(task.block)));
    total = evolve_array(graph, step.pattern, controls, params) * total;
  }
  return total;
}

double process_fidelity(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw std::invalid_argument("process_fidelity: size mismatch");
  const double d = static_cast<double>(u.rows());
  return std::norm((v.adjoint() * u).trace()) / (d * d);
}

}  // namespace zzp
