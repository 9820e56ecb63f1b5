#include <charconv>
#include <sstream>

#include "cli.hpp"

#ifndef ZZPULSE_VERSION
#define ZZPULSE_VERSION "unknown"
#endif

namespace zzp::cli {

void Command::resolve() {
  config = defaults;
  if (!config_path.empty()) {
    if (!std::filesystem::exists(config_path)) throw UsageError("config file not found: " + config_path);
    Json file;
    try {
      file = read_json_file(config_path);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    if (!file.is_object()) throw UsageError(config_path + ": expected a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!defaults.contains(key)) throw UsageError(config_path + ": unknown key '" + key + "' for " + name);
      config[key] = value;
    }
  }
  for (const auto& [key, value] : overrides.items()) config[key] = value;
}

std::filesystem::path Command::output_dir() const {
  std::filesystem::path dir = config.at("output").get<std::string>();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::filesystem::path Command::output_file(const std::string& file) const { return output_dir() / file; }

Json Command::provenance() const {
  return {{"tool", "zzpulse"}, {"version", ZZPULSE_VERSION}, {"command", name}, {"seed", config.at("seed")}, {"config", config}};
}

void Command::write_json(const std::string& file, Json body) const {
  Json doc = provenance();
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  write_json_file(output_file(file).string(), doc);
}

void Command::write_csv(const std::string& file, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) const {
  const auto path = output_file(file);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# zzpulse " << ZZPULSE_VERSION << ' ' << name << '\n';
  out << "# seed: " << config.at("seed").dump() << '\n';
  out << "# config: " << config.dump() << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(long long x) { return std::to_string(x); }

std::string join(const std::vector<int>& xs, char sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(xs[i]);
  }
  return s;
}

void add_common_options(Command& cmd) {
  cmd.app->add_option("-c,--config", cmd.config_path, "JSON config file; flags override its values");
  cmd.option<std::string>("-o,--output", "output", "Output directory");
  cmd.option<std::uint64_t>("--seed", "seed", "Random seed");
  cmd.option<int>("--threads", "threads", "Worker threads for corner evaluation");
}

Json common_defaults() { return {{"output", "."}, {"seed", 1}, {"threads", 1}}; }

void add_graph_options(Command& cmd) {
  cmd.option<std::string>("--graph", "graph", "Graph JSON file (num_qubits, edges, optional driven/gate_pairs)");
  cmd.option<std::string>("--geometry", "geometry", "Generated lattice: honeycomb, square or chain");
  cmd.option<int>("--rows", "rows", "Rows (hexagons, sites, or chain length)");
  cmd.option<int>("--cols", "cols", "Columns (ignored for chains)");
  cmd.option<double>("--coupling", "coupling", "Uniform coupling J in units of the nominal coupling");
}

Json graph_defaults() {
  return {{"graph", nullptr}, {"geometry", "honeycomb"}, {"rows", 2}, {"cols", 2}, {"coupling", 1.0}};
}

QubitGraph load_graph(const Command& cmd, Json* document) {
  const Json& c = cmd.config;
  if (!c.at("graph").is_null()) {
    const std::string path = c.at("graph").get<std::string>();
    if (!std::filesystem::exists(path)) throw UsageError("graph file not found: " + path);
    Json doc;
    try {
      doc = read_json_file(path);
      QubitGraph g = graph_from_json(doc);
      if (document) *document = std::move(doc);
      return g;
    } catch (const std::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  try {
    const Geometry geom = geometry_from_string(c.at("geometry").get<std::string>());
    const int rows = c.at("rows").get<int>();
    const int cols = c.at("cols").get<int>();
    const double j = c.at("coupling").get<double>();
    switch (geom) {
      case Geometry::honeycomb: return build_honeycomb(rows, cols, j);
      case Geometry::square: return build_square(rows, cols, j);
      case Geometry::chain: return build_chain(rows, j);
      case Geometry::custom: break;
    }
  } catch (const std::exception& e) {
    throw UsageError(std::string("lattice: ") + e.what());
  }
  throw UsageError("geometry 'custom' needs --graph");
}

void add_optimization_options(Command& cmd) {
  cmd.option<std::vector<double>>("--uncertainty", "uncertainty",
                                  "Interval widths: coupling fraction, amplitude fraction, detuning fraction")
      ->expected(3);
  cmd.option<double>("--nominal", "nominal", "Nominal coupling J used to scale coupling and detuning widths");
  cmd.option<int>("--bins", "bins", "Piecewise-constant bins M");
  cmd.option<double>("--duration", "duration", "Pulse duration T in units of 1/J");
  cmd.option<double>("--omega-max", "omega_max", "Rabi amplitude bound in units of J");
  cmd.option<std::string>("--algorithm", "algorithm", "scp or avg");
  cmd.option<int>("--max-iterations", "max_iterations", "SCP iteration limit per restart");
  cmd.option<int>("--max-evaluations", "max_evaluations", "Objective evaluation limit per restart (avg)");
  cmd.option<double>("--step-tolerance", "step_tolerance", "SCP stops when the trust region falls below this");
  cmd.option<double>("--trust-region", "trust_region_init", "Initial trust region / first step size");
  cmd.option<int>("--restarts", "num_restarts", "Random restarts");
  cmd.option<double>("--init-amplitude", "init_amplitude", "Random starts are uniform in [-a, a]");
  cmd.option<double>("--target-infidelity", "target_infidelity", "Stop once the worst-case infidelity reaches this");
  cmd.option<std::string>("--corner-set", "corner_set", "Corners to iterate on: all or resolution_iv");
}

Json optimization_defaults() {
  const OptimizationConfig d;
  Json j = to_json(d);
  j.erase("initial_controls");
  j.erase("seed");
  j.erase("threads");
  j["uncertainty"] = {0.0, 0.0, 0.0};
  j["nominal"] = 1.0;
  return j;
}

OptimizationConfig optimization_config(const Json& c) {
  Json j = Json::object();
  for (const char* key : {"bins", "duration", "omega_max", "algorithm", "max_iterations", "max_evaluations",
                          "step_tolerance", "trust_region_init", "growth", "shrink", "seed", "num_restarts",
                          "init_amplitude", "target_infidelity", "threads", "corner_set"}) {
    if (c.contains(key)) j[key] = c.at(key);
  }
  try {
    OptimizationConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
  } catch (const std::exception& e) {
    throw UsageError(std::string("optimization config: ") + e.what());
  }
}

UncertaintySpec uncertainty_config(const Json& c) {
  try {
    const Json& u = c.at("uncertainty");
    Json spec;
    if (u.is_array()) {
      if (u.size() != 3) throw std::invalid_argument("uncertainty needs three values");
      spec = {{"coupling_frac", u[0]}, {"amplitude_frac", u[1]}, {"detuning_frac", u[2]}};
    } else {
      spec = u;
    }
    if (c.contains("nominal")) spec["nominal"] = c.at("nominal");
    return uncertainty_from_json(spec);
  } catch (const std::exception& e) {
    throw UsageError(std::string("uncertainty: ") + e.what());
  }
}

}  // namespace zzp::cli
