#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "zzpulse/calibration.hpp"
#include "zzpulse/compiler.hpp"
#include "zzpulse/hamiltonian.hpp"
#include "zzpulse/lattice.hpp"
#include "zzpulse/robust.hpp"

namespace zzp {

using Json = nlohmann::ordered_json;

/// {"num_qubits", "geometry", "edges": [[a, b, J]], "coords": [[row, col]]}
Json to_json(const QubitGraph& graph);
QubitGraph graph_from_json(const Json& j);

/// {"driven": [...], "gate_pairs": [[a, b]]}
Json to_json(const DrivingPattern& pattern);
DrivingPattern pattern_from_json(const Json& j);

/// {"center", "boundary", "couplings": [[i, j, J]]} in block-local indices.
Json to_json(const Block& block);
Block block_from_json(const Json& j);

/// {"duration", "bins", "channels", "values"}; values are channel-major,
/// then bin, then (x, y).
Json to_json(const ControlVector& controls);
ControlVector controls_from_json(const Json& j);

Json to_json(const UncertaintySpec& spec);
UncertaintySpec uncertainty_from_json(const Json& j);

/// Every field except the callback; missing keys keep their defaults.
Json to_json(const OptimizationConfig& config);
OptimizationConfig config_from_json(const Json& j, OptimizationConfig base = {});

/// Corner fidelities are keyed by the decimal corner bitmask.
Json to_json(const OptimizationResult& result);
OptimizationResult result_from_json(const Json& j);

Json to_json(const Schedule& schedule);
Json to_json(const ScheduleReport& report);

Json to_json(const BlockShape& shape);
BlockShape shape_from_json(const Json& j);
Json to_json(const PulseLibrary& library);
PulseLibrary library_from_json(const Json& j);

Json to_json(const PeakSet& peaks);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace zzp
