#include "zzpulse/io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace zzp {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

Json to_json(const QubitGraph& graph) {
  Json j;
  j["num_qubits"] = graph.num_qubits();
  j["geometry"] = to_string(graph.geometry());
  Json edges = Json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.a, e.b, e.coupling});
  j["edges"] = edges;
  if (graph.has_coords()) {
    Json coords = Json::array();
    for (const auto& c : graph.coords()) coords.push_back({c.row, c.col});
    j["coords"] = coords;
  }
  return j;
}

QubitGraph graph_from_json(const Json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (e.size() != 2 && e.size() != 3) throw std::invalid_argument("graph: edges are [a, b] or [a, b, J]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
  }
  std::vector<SiteCoord> coords;
  if (j.contains("coords")) {
    for (const auto& c : j.at("coords")) coords.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  }
  const Geometry geom = geometry_from_string(get_or<std::string>(j, "geometry", "custom"));
  return QubitGraph(j.at("num_qubits").get<int>(), std::move(edges), geom, std::move(coords));
}

Json to_json(const DrivingPattern& pattern) {
  Json pairs = Json::array();
  for (const auto& [a, b] : pattern.gate_pairs) pairs.push_back({a, b});
  return {{"driven", pattern.driven}, {"gate_pairs", pairs}};
}

DrivingPattern pattern_from_json(const Json& j) {
  DrivingPattern p;
  p.driven = j.at("driven").get<std::vector<int>>();
  std::sort(p.driven.begin(), p.driven.end());
  if (j.contains("gate_pairs")) {
    for (const auto& pr : j.at("gate_pairs")) p.gate_pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
  }
  return p;
}

Json to_json(const Block& block) {
  Json couplings = Json::array();
  for (const auto& c : block.couplings) couplings.push_back({c.i, c.j, c.coupling});
  return {{"center", block.center}, {"boundary", block.boundary}, {"couplings", couplings}};
}

Block block_from_json(const Json& j) {
  Block b;
  b.center = j.at("center").get<std::vector<int>>();
  b.boundary = j.at("boundary").get<std::vector<int>>();
  for (const auto& c : j.at("couplings")) b.couplings.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
  return b;
}

Json to_json(const ControlVector& c) {
  return {{"duration", c.duration()}, {"bins", c.bins()}, {"channels", c.channels()}, {"values", c.values()}};
}

ControlVector controls_from_json(const Json& j) {
  return ControlVector(j.at("duration").get<double>(), j.at("bins").get<int>(), j.at("channels").get<int>(),
                       j.at("values").get<std::vector<double>>());
}

Json to_json(const UncertaintySpec& s) {
  return {{"coupling_frac", s.coupling_frac},
          {"amplitude_frac", s.amplitude_frac},
          {"detuning_frac", s.detuning_frac},
          {"nominal", s.nominal}};
}

UncertaintySpec uncertainty_from_json(const Json& j) {
  UncertaintySpec s;
  s.coupling_frac = get_or(j, "coupling_frac", s.coupling_frac);
  s.amplitude_frac = get_or(j, "amplitude_frac", s.amplitude_frac);
  s.detuning_frac = get_or(j, "detuning_frac", s.detuning_frac);
  s.nominal = get_or(j, "nominal", s.nominal);
  s.validate();
  return s;
}

Json to_json(const OptimizationConfig& c) {
  Json j = {{"bins", c.bins},
            {"duration", c.duration},
            {"omega_max", c.omega_max},
            {"algorithm", to_string(c.algorithm)},
            {"max_iterations", c.max_iterations},
            {"max_evaluations", c.max_evaluations},
            {"step_tolerance", c.step_tolerance},
            {"trust_region_init", c.trust_region_init},
            {"growth", c.growth},
            {"shrink", c.shrink},
            {"seed", c.seed},
            {"num_restarts", c.num_restarts},
            {"init_amplitude", c.init_amplitude},
            {"target_infidelity", c.target_infidelity},
            {"threads", c.threads},
            {"corner_set", to_string(c.corner_set)}};
  j["initial_controls"] = c.initial_controls ? to_json(*c.initial_controls) : Json(nullptr);
  return j;
}

OptimizationConfig config_from_json(const Json& j, OptimizationConfig c) {
  c.bins = get_or(j, "bins", c.bins);
  c.duration = get_or(j, "duration", c.duration);
  c.omega_max = get_or(j, "omega_max", c.omega_max);
  if (j.contains("algorithm")) c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  c.max_iterations = get_or(j, "max_iterations", c.max_iterations);
  c.max_evaluations = get_or(j, "max_evaluations", c.max_evaluations);
  c.step_tolerance = get_or(j, "step_tolerance", c.step_tolerance);
  c.trust_region_init = get_or(j, "trust_region_init", c.trust_region_init);
  c.growth = get_or(j, "growth", c.growth);
  c.shrink = get_or(j, "shrink", c.shrink);
  c.seed = get_or(j, "seed", c.seed);
  c.num_restarts = get_or(j, "num_restarts", c.num_restarts);
  c.init_amplitude = get_or(j, "init_amplitude", c.init_amplitude);
  c.target_infidelity = get_or(j, "target_infidelity", c.target_infidelity);
  c.threads = get_or(j, "threads", c.threads);
  if (j.contains("corner_set")) c.corner_set = corner_set_from_string(j.at("corner_set").get<std::string>());
  if (j.contains("initial_controls") && !j.at("initial_controls").is_null()) {
    c.initial_controls = controls_from_json(j.at("initial_controls"));
  }
  return c;
}

Json to_json(const OptimizationResult& r) {
  Json corners = Json::object();
  for (std::size_t k = 0; k < r.corner_fidelities.size(); ++k) corners[std::to_string(k)] = r.corner_fidelities[k];
  Json trace = Json::array();
  for (const auto& t : r.trace) trace.push_back({t.iteration, t.min_fidelity, t.mean_fidelity});
  return {{"min_fidelity", r.min_fidelity},
          {"worst_infidelity", r.worst_infidelity()},
          {"argmin_corner", r.argmin_corner},
          {"mean_fidelity", r.mean_fidelity},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"best_restart", r.best_restart},
          {"terminated_reason", r.terminated_reason},
          {"controls", to_json(r.controls)},
          {"corner_fidelities", corners},
          {"trace", trace}};
}

OptimizationResult result_from_json(const Json& j) {
  OptimizationResult r;
  r.controls = controls_from_json(j.at("controls"));
  r.min_fidelity = j.at("min_fidelity").get<double>();
  r.argmin_corner = get_or(j, "argmin_corner", 0);
  r.mean_fidelity = get_or(j, "mean_fidelity", r.min_fidelity);
  r.iterations = get_or(j, "iterations", 0);
  r.evaluations = get_or(j, "evaluations", 0);
  r.best_restart = get_or(j, "best_restart", 0);
  r.terminated_reason = get_or<std::string>(j, "terminated_reason", "");
  if (j.contains("corner_fidelities")) {
    const Json& cf = j.at("corner_fidelities");
    r.corner_fidelities.assign(cf.size(), 0.0);
    for (const auto& [key, value] : cf.items()) {
      const std::size_t k = std::stoul(key);
      if (k >= r.corner_fidelities.size()) throw std::invalid_argument("corner_fidelities: bitmask out of range");
      r.corner_fidelities[k] = value.get<double>();
    }
  }
  if (j.contains("trace")) {
    for (const auto& t : j.at("trace")) r.trace.push_back({t.at(0).get<int>(), t.at(1).get<double>(), t.at(2).get<double>()});
  }
  return r;
}

Json to_json(const Schedule& s) {
  Json steps = Json::array();
  for (const auto& step : s.steps) {
    Json blocks = Json::array();
    for (const auto& t : step.tasks) {
      blocks.push_back({{"center", t.block.center},
                        {"boundary", t.block.boundary},
                        {"target", t.target.label},
                        {"shape", block_shape(t.block).describe()},
                        {"instructions", t.instructions}});
    }
    Json pattern = to_json(step.pattern);
    steps.push_back({{"driven", pattern["driven"]}, {"gate_pairs", pattern["gate_pairs"]}, {"blocks", blocks}});
  }
  return {{"step_count", s.step_count()}, {"circuit_depth", s.circuit_depth}, {"steps", steps}};
}

Json to_json(const ScheduleReport& r) {
  return {{"valid", r.valid()},
          {"step_count", r.step_count},
          {"circuit_depth", r.circuit_depth},
          {"overhead", r.overhead},
          {"overhead_above_2", r.overhead_flag},
          {"pattern_issues", r.pattern_issues},
          {"coverage_issues", r.coverage_issues}};
}

Json to_json(const BlockShape& s) {
  return {{"num_center", s.num_center},
          {"num_boundary", s.num_boundary},
          {"center_couplings", s.center_couplings},
          {"boundary_profiles", s.boundary_profiles},
          {"description", s.describe()}};
}

BlockShape shape_from_json(const Json& j) {
  BlockShape s;
  s.num_center = j.at("num_center").get<int>();
  s.num_boundary = j.at("num_boundary").get<int>();
  s.center_couplings = j.at("center_couplings").get<std::vector<long long>>();
  s.boundary_profiles = j.at("boundary_profiles").get<std::vector<std::vector<long long>>>();
  return s;
}

Json to_json(const PulseLibrary& library) {
  Json entries = Json::array();
  for (const auto& [key, controls] : library.entries()) {
    entries.push_back({{"label", key.first}, {"shape", to_json(key.second)}, {"controls", to_json(controls)}});
  }
  return {{"pulses", entries}};
}

PulseLibrary library_from_json(const Json& j) {
  PulseLibrary lib;
  for (const auto& e : j.at("pulses")) {
    lib.add(e.at("label").get<std::string>(), shape_from_json(e.at("shape")), controls_from_json(e.at("controls")));
  }
  return lib;
}

Json to_json(const PeakSet& p) { return {{"one_photon", p.one_photon}, {"two_photon", p.two_photon}}; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace zzp
