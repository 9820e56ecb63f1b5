#include <iomanip>
#include <iostream>
#include <map>

#include "cli.hpp"

using namespace zzp::cli;

int main(int argc, char** argv) {
  std::cout << std::setprecision(10);
  std::cerr << std::setprecision(6);
  CLI::App app{"Robust pulse synthesis for ZZ-coupled qubit arrays", "zzpulse"};
  app.set_version_flag("--version", ZZPULSE_VERSION);
  app.require_subcommand(1);

  struct Entry {
    void (*setup)(Command&);
    int (*run)(Command&);
    const char* help;
  };
  const std::map<std::string, Entry> table = {
      {"lattice", {setup_lattice, run_lattice, "Generate a lattice and driving pattern"}},
      {"validate", {setup_validate, run_validate, "Check a pattern and its block decomposition"}},
      {"optimize", {setup_optimize, run_optimize, "Optimize a robust pulse for one block"}},
      {"calibrate", {setup_calibrate, run_calibrate, "Recover qubit frequencies from spectroscopy peaks"}},
      {"compile", {setup_compile, run_compile, "Schedule a circuit onto driving patterns"}},
      {"simulate", {setup_simulate, run_simulate, "Compile, build pulses and simulate a circuit"}},
  };
  std::map<std::string, Command> commands;
  for (const auto& [name, entry] : table) {
    Command& cmd = commands[name];
    cmd.name = name;
    cmd.app = app.add_subcommand(name, entry.help);
    entry.setup(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (auto& [name, cmd] : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      cmd.resolve();
      return table.at(name).run(cmd);
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: config: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitFailure;
    }
  }
  return kExitUsage;
}
