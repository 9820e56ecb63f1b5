#include <iostream>
#include <sstream>

#include "cli.hpp"

namespace zzp::cli {

Circuit load_checked_circuit(const Json& c, const QubitGraph& graph) {
  if (c.at("circuit").is_null()) throw UsageError("--circuit is required");
  const std::string path = c.at("circuit").get<std::string>();
  std::ifstream in(path);
  if (!in) throw UsageError("circuit file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    Circuit circuit = parse_circuit(ss.str());
    check_circuit(circuit, graph);
    return circuit;
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

ScheduleReport write_schedule(const Command& cmd, const Schedule& schedule, const Circuit& circuit,
                              const QubitGraph& graph) {
  const ScheduleReport report = verify_schedule(schedule, circuit, graph);
  cmd.write_json("schedule.json", {{"circuit", format_circuit(circuit)},
                                   {"schedule", to_json(schedule)},
                                   {"report", to_json(report)}});
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    const auto& step = schedule.steps[s];
    for (std::size_t b = 0; b < step.tasks.size(); ++b) {
      const auto& t = step.tasks[b];
      std::string text;
      for (int i : t.instructions) {
        if (!text.empty()) text += ';';
        text += circuit.gates[i].label + ' ' + join(circuit.gates[i].qubits);
      }
      rows.push_back({fmt(static_cast<int>(s)), fmt(static_cast<int>(b)), join(t.block.center), join(t.block.boundary),
                      t.target.label, text});
    }
  }
  cmd.write_csv("schedule.csv", {"step", "block", "center", "boundary", "target", "instructions"}, rows);
  std::cout << circuit.gates.size() << " gates, depth " << report.circuit_depth << ", " << report.step_count
            << " steps, overhead " << report.overhead << (report.overhead_flag ? " (above 2)" : "") << '\n';
  for (const auto& issue : report.pattern_issues) std::cout << "  pattern issue: " << issue << '\n';
  for (const auto& issue : report.coverage_issues) std::cout << "  coverage issue: " << issue << '\n';
  return report;
}

void setup_compile(Command& cmd) {
  Json d = common_defaults();
  d.update(graph_defaults());
  d["circuit"] = nullptr;
  cmd.defaults = d;
  add_common_options(cmd);
  add_graph_options(cmd);
  cmd.option<std::string>("--circuit", "circuit", "Circuit text file, one instruction per line (e.g. CNOT 5 6)");
}

int run_compile(Command& cmd) {
  const QubitGraph graph = load_graph(cmd);
  const Circuit circuit = load_checked_circuit(cmd.config, graph);
  const Schedule schedule = compile(circuit, graph);
  const ScheduleReport report = write_schedule(cmd, schedule, circuit, graph);
  return report.valid() ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
