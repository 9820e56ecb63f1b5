#include <iostream>

#include "cli.hpp"

namespace zzp::cli {

void setup_lattice(Command& cmd) {
  Json d = common_defaults();
  d.update(graph_defaults());
  d["pattern"] = "single";
  d["sublattice"] = nullptr;
  d["gate_pair"] = nullptr;
  cmd.defaults = d;
  add_common_options(cmd);
  add_graph_options(cmd);
  cmd.option<std::string>("--pattern", "pattern", "Driving pattern: single, two or none");
  cmd.option<int>("--sublattice", "sublattice", "Driven color class for the single-qubit pattern");
  cmd.option<std::vector<int>>("--gate-pair", "gate_pair", "Target bond of the two-qubit pattern")->expected(2);
}

int run_lattice(Command& cmd) {
  const Json& c = cmd.config;
  const QubitGraph graph = load_graph(cmd);
  const std::string kind = c.at("pattern").get<std::string>();
  std::optional<DrivingPattern> pattern;
  try {
    if (kind == "single") {
      std::optional<int> sub;
      if (!c.at("sublattice").is_null()) sub = c.at("sublattice").get<int>();
      pattern = single_qubit_pattern(graph, sub);
    } else if (kind == "two") {
      if (c.at("gate_pair").is_null()) throw UsageError("--pattern two needs --gate-pair");
      const auto pr = c.at("gate_pair").get<std::vector<int>>();
      if (pr.size() != 2) throw UsageError("gate_pair needs two qubits");
      pattern = two_qubit_pattern(graph, {pr[0], pr[1]});
    } else if (kind != "none") {
      throw UsageError("unknown pattern '" + kind + "'");
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  Json doc = to_json(graph);
  std::vector<Block> blocks;
  bool ok = true;
  if (pattern) {
    const Json pj = to_json(*pattern);
    doc["driven"] = pj["driven"];
    doc["gate_pairs"] = pj["gate_pairs"];
    const ValidationReport report = validate_pattern(graph, *pattern);
    Json violations = Json::array();
    for (const auto& v : report.violations) violations.push_back(v.describe());
    doc["violations"] = violations;
    ok = report.ok();
    blocks = decompose_blocks(graph, *pattern);
    Json bj = Json::array();
    for (const auto& b : blocks) bj.push_back(to_json(b));
    doc["blocks"] = bj;
  }
  cmd.write_json("lattice.json", doc);

  std::vector<std::vector<std::string>> rows;
  for (int q = 0; q < graph.num_qubits(); ++q) {
    const bool generated = graph.geometry() != Geometry::custom;
    rows.push_back({fmt(q), graph.has_coords() ? fmt(graph.coords()[q].row) : "", graph.has_coords() ? fmt(graph.coords()[q].col) : "",
                    generated ? fmt(graph.color(q)) : "", fmt(graph.degree(q)),
                    pattern ? fmt(static_cast<int>(pattern->is_driven(q))) : "0"});
  }
  cmd.write_csv("qubits.csv", {"qubit", "row", "col", "color", "degree", "driven"}, rows);
  rows.clear();
  for (const auto& e : graph.edges()) rows.push_back({fmt(e.a), fmt(e.b), fmt(e.coupling)});
  cmd.write_csv("edges.csv", {"a", "b", "coupling"}, rows);
  if (pattern) {
    rows.clear();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      rows.push_back({fmt(static_cast<int>(k)), join(blocks[k].center), join(blocks[k].boundary), fmt(blocks[k].size())});
    }
    cmd.write_csv("blocks.csv", {"block", "center", "boundary", "size"}, rows);
  }
  std::cout << graph.num_qubits() << " qubits, " << graph.edges().size() << " edges";
  if (pattern) std::cout << ", " << pattern->driven.size() << " driven, " << blocks.size() << " blocks";
  std::cout << (ok ? "" : ", pattern INVALID") << '\n';
  return ok ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
