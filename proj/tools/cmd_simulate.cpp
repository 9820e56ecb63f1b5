#include <iostream>

#include "cli.hpp"

namespace zzp::cli {

void setup_simulate(Command& cmd) {
  Json d = common_defaults();
  d.update(graph_defaults());
  d.update(optimization_defaults());
  d.update({{"circuit", nullptr},
            {"library", nullptr},
            {"algorithm", "avg_quasi_newton"},
            {"target_infidelity", 1e-12},
            {"min_fidelity", nullptr}});
  cmd.defaults = d;
  add_common_options(cmd);
  add_graph_options(cmd);
  add_optimization_options(cmd);
  cmd.option<std::string>("--circuit", "circuit", "Circuit text file");
  cmd.option<std::string>("--library", "library", "Pulse library JSON; optimized from scratch when absent");
  cmd.option<double>("--min-fidelity", "min_fidelity", "Exit 1 unless the process fidelity is at least this");
}

int run_simulate(Command& cmd) {
  const Json& c = cmd.config;
  const QubitGraph graph = load_graph(cmd);
  if (graph.num_qubits() > kMaxArrayQubits) {
    throw UsageError("simulate is limited to " + std::to_string(kMaxArrayQubits) + " qubits");
  }
  const Circuit circuit = load_checked_circuit(c, graph);
  const Schedule schedule = compile(circuit, graph);
  const ScheduleReport report = write_schedule(cmd, schedule, circuit, graph);

  PulseLibrary library;
  if (!c.at("library").is_null()) {
    const std::string path = c.at("library").get<std::string>();
    if (!std::filesystem::exists(path)) throw UsageError("library file not found: " + path);
    try {
      library = library_from_json(read_json_file(path));
    } catch (const std::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  } else {
    const OptimizationConfig config = optimization_config(c);
    const UncertaintySpec spec = uncertainty_config(c);
    library = build_pulse_library(schedule, config, spec, [](const std::string& label, const BlockShape& shape, double inf) {
      std::cerr << "pulse " << label << " on " << shape.describe() << ": worst-case infidelity " << inf << '\n';
    });
    cmd.write_json("library.json", to_json(library));
  }

  Matrix u;
  try {
    u = simulate_schedule(schedule, graph, library, nominal_array_parameters(graph));
  } catch (const std::out_of_range& e) {
    std::cerr << "error: pulse library is missing a pulse: " << e.what() << '\n';
    return kExitFailure;
  }
  const Matrix ideal = circuit_unitary(circuit, graph.num_qubits());
  const double f = process_fidelity(u, ideal);
  const bool ok = report.valid() && (c.at("min_fidelity").is_null() || f >= c.at("min_fidelity").get<double>());
  cmd.write_json("simulate.json", {{"process_fidelity", f},
                                   {"process_infidelity", 1.0 - f},
                                   {"steps", schedule.step_count()},
                                   {"pulses", library.size()},
                                   {"passed", ok}});
  std::cout << "process fidelity " << f << " (infidelity " << 1.0 - f << ")" << (ok ? "" : " FAIL") << '\n';
  return ok ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
