#include <iostream>
#include <numbers>
#include <random>

#include "cli.hpp"

namespace zzp::cli {

void setup_validate(Command& cmd) {
  Json d = common_defaults();
  d.update(graph_defaults());
  d.update({{"pattern", "single"},
            {"sublattice", nullptr},
            {"gate_pair", nullptr},
            {"driven", nullptr},
            {"gate_pairs", nullptr},
            {"bins", 4},
            {"duration", 2.0 * std::numbers::pi},
            {"amplitude", 2.0},
            {"parameter_spread", 0.1},
            {"tolerance", 1e-10}});
  cmd.defaults = d;
  add_common_options(cmd);
  add_graph_options(cmd);
  cmd.option<std::string>("--pattern", "pattern", "Generated pattern when none is given: single or two");
  cmd.option<int>("--sublattice", "sublattice", "Driven color class for the single-qubit pattern");
  cmd.option<std::vector<int>>("--gate-pair", "gate_pair", "Target bond of the two-qubit pattern")->expected(2);
  cmd.option<std::vector<int>>("--driven", "driven", "Explicit driven qubits (overrides the graph file)");
  cmd.option<int>("--bins", "bins", "Bins of the random test pulses");
  cmd.option<double>("--tolerance", "tolerance", "Bound on commutators and on the evolution mismatch");
}

namespace {

DrivingPattern resolve_pattern(const Json& c, const QubitGraph& graph, const Json& document) {
  Json source;
  if (!c.at("driven").is_null()) {
    source = {{"driven", c.at("driven")}, {"gate_pairs", c.at("gate_pairs").is_null() ? Json::array() : c.at("gate_pairs")}};
  } else if (document.contains("driven")) {
    source = document;
  }
  if (!source.is_null()) return pattern_from_json(source);
  const std::string kind = c.at("pattern").get<std::string>();
  if (kind == "single") {
    std::optional<int> sub;
    if (!c.at("sublattice").is_null()) sub = c.at("sublattice").get<int>();
    return single_qubit_pattern(graph, sub);
  }
  if (kind == "two") {
    if (c.at("gate_pair").is_null()) throw UsageError("--pattern two needs --gate-pair");
    const auto pr = c.at("gate_pair").get<std::vector<int>>();
    if (pr.size() != 2) throw UsageError("gate_pair needs two qubits");
    return two_qubit_pattern(graph, {pr[0], pr[1]});
  }
  throw UsageError("unknown pattern '" + kind + "'");
}

struct Check {
  std::string name;
  std::string status;  // pass, fail, skipped
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

}  // namespace

int run_validate(Command& cmd) {
  const Json& c = cmd.config;
  Json document;
  const QubitGraph graph = load_graph(cmd, &document);
  DrivingPattern pattern;
  try {
    pattern = resolve_pattern(c, graph, document);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(std::string("pattern: ") + e.what());
  }
  const double tol = c.at("tolerance").get<double>();
  std::vector<Check> checks;

  const ValidationReport report = validate_pattern(graph, pattern);
  Json violations = Json::array();
  for (const auto& v : report.violations) violations.push_back(v.describe());
  checks.push_back({"pattern", report.ok() ? "pass" : "fail", static_cast<double>(report.violations.size()), 0.0,
                    std::to_string(report.violations.size()) + " violations"});

  std::vector<Block> blocks;
  try {
    blocks = decompose_blocks(graph, pattern);
    checks.push_back({"decomposition", "pass", static_cast<double>(blocks.size()), 0.0,
                      std::to_string(blocks.size()) + " blocks"});
  } catch (const std::exception& e) {
    checks.push_back({"decomposition", "fail", 0.0, 0.0, e.what()});
  }

  if (!blocks.empty()) {
    const auto overlaps = overlapping_block_pairs(blocks);
    std::string detail;
    for (const auto& [a, b] : overlaps) detail += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
    checks.push_back({"block_supports", overlaps.empty() ? "pass" : "fail", static_cast<double>(overlaps.size()), 0.0,
                      overlaps.empty() ? "no center touches another block" : "overlapping pairs " + detail});

    if (graph.num_qubits() <= kMaxArrayQubits) {
      std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
      const double amp = c.at("amplitude").get<double>();
      const double spread = c.at("parameter_spread").get<double>();
      std::uniform_real_distribution<double> pulse(-amp, amp);
      std::uniform_real_distribution<double> jitter(-spread, spread);
      std::vector<ControlVector> controls;
      for (const auto& b : blocks) {
        ControlVector cv(c.at("duration").get<double>(), c.at("bins").get<int>(), b.num_center());
        for (auto& v : cv.values()) v = pulse(rng);
        controls.push_back(std::move(cv));
      }
      ArrayParameters params = nominal_array_parameters(graph);
      for (auto& x : params.couplings) x *= 1.0 + jitter(rng);
      for (auto& x : params.amplitude_scales) x *= 1.0 + jitter(rng);
      for (auto& x : params.detunings) x = jitter(rng);

      const double comm = max_block_commutator(graph, pattern, controls, params);
      checks.push_back({"commutators", comm <= tol ? "pass" : "fail", comm, tol, "max |[H_a, H_b]| entry"});
      const Matrix full = evolve_array(graph, pattern, controls, params);
      const Matrix product = block_product_evolution(graph, pattern, controls, params);
      const double diff = (full - product).cwiseAbs().maxCoeff();
      checks.push_back({"evolution", diff <= tol ? "pass" : "fail", diff, tol, "max |U_full - prod U_block| entry"});
    } else {
      const std::string why = "array has more than " + std::to_string(kMaxArrayQubits) + " qubits";
      checks.push_back({"commutators", "skipped", 0.0, tol, why});
      checks.push_back({"evolution", "skipped", 0.0, tol, why});
    }
  }

  bool ok = true;
  Json cj = Json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& ch : checks) {
    ok = ok && ch.status != "fail";
    cj.push_back({{"check", ch.name}, {"status", ch.status}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"detail", ch.detail}});
    rows.push_back({ch.name, ch.status, fmt(ch.value), fmt(ch.tolerance), "\"" + ch.detail + "\""});
    std::cout << (ch.status == "pass" ? "PASS " : ch.status == "fail" ? "FAIL " : "SKIP ") << ch.name << ": " << ch.detail;
    if (ch.status != "skipped" && (ch.name == "commutators" || ch.name == "evolution")) std::cout << " = " << ch.value;
    std::cout << '\n';
  }
  for (const auto& v : violations) std::cout << "  violation: " << v.get<std::string>() << '\n';
  cmd.write_json("validate.json", {{"valid", ok}, {"pattern", to_json(pattern)}, {"violations", violations}, {"checks", cj}});
  cmd.write_csv("validate.csv", {"check", "status", "value", "tolerance", "detail"}, rows);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
