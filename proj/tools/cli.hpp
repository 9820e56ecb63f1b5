#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zzpulse/io.hpp"

namespace zzp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, unreadable or inconsistent configuration: exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One subcommand: defaults, values from --config and explicit flags, merged
/// in that order into `config`.
struct Command {
  std::string name;
  CLI::App* app = nullptr;
  Json defaults;
  Json overrides = Json::object();
  std::string config_path;
  Json config;

  /// Registers `--flag` writing `key` of the overrides when given.
  template <class T>
  CLI::Option* option(const std::string& flag, const std::string& key, const std::string& help) {
    return app->add_option_function<T>(flag, [this, key](const T& v) { overrides[key] = v; }, help);
  }
  CLI::Option* flag(const std::string& flag, const std::string& key, const std::string& help) {
    return app->add_flag_function(flag, [this, key](std::int64_t n) { overrides[key] = n > 0; }, help);
  }

  /// Fills `config`; unknown keys in the file are usage errors.
  void resolve();

  std::filesystem::path output_dir() const;
  std::filesystem::path output_file(const std::string& name) const;

  /// {"tool", "version", "command", "seed", "config"} stamped on every artifact.
  Json provenance() const;
  void write_json(const std::string& name, Json body) const;
  /// Comma-separated table preceded by '#' lines carrying the provenance.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) const;
};

/// Shortest round-trip formatting for table cells.
std::string fmt(double x);
std::string fmt(long long x);
inline std::string fmt(int x) { return fmt(static_cast<long long>(x)); }
std::string join(const std::vector<int>& xs, char sep = ' ');

/// Options naming a graph: --graph file or --geometry/--rows/--cols/--coupling.
void add_graph_options(Command& cmd);
Json graph_defaults();
/// Graph plus the document it came from (empty when generated).
QubitGraph load_graph(const Command& cmd, Json* document = nullptr);

void add_optimization_options(Command& cmd);
Json optimization_defaults();
OptimizationConfig optimization_config(const Json& config);
UncertaintySpec uncertainty_config(const Json& config);

/// Parses and checks the --circuit file against the graph.
Circuit load_checked_circuit(const Json& config, const QubitGraph& graph);
/// Writes schedule.json and schedule.csv and prints the verification summary.
ScheduleReport write_schedule(const Command& cmd, const Schedule& schedule, const Circuit& circuit,
                              const QubitGraph& graph);

void add_common_options(Command& cmd);
Json common_defaults();

void setup_lattice(Command& cmd);
int run_lattice(Command& cmd);
void setup_validate(Command& cmd);
int run_validate(Command& cmd);
void setup_optimize(Command& cmd);
int run_optimize(Command& cmd);
void setup_calibrate(Command& cmd);
int run_calibrate(Command& cmd);
void setup_compile(Command& cmd);
int run_compile(Command& cmd);
void setup_simulate(Command& cmd);
int run_simulate(Command& cmd);

}  // namespace zzp::cli
