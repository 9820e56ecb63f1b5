#include <chrono>
#include <iostream>
#include <sstream>

#include "cli.hpp"

namespace zzp::cli {

void setup_optimize(Command& cmd) {
  Json d = common_defaults();
  d.update(optimization_defaults());
  d.update({{"algorithm", "avg_quasi_newton"},
            {"block", "honeycomb-1q"},
            {"target", "H"},
            {"initial", nullptr},
            {"checkpoint_every", 25},
            {"resume", false},
            {"require_infidelity", nullptr}});
  cmd.defaults = d;
  add_common_options(cmd);
  add_optimization_options(cmd);
  cmd.option<std::string>("--block", "block", "Reference block name (honeycomb-1q, honeycomb-2q, ...) or block JSON file");
  cmd.option<std::string>("--target", "target", "Target gate label; '*' joins tensor factors, e.g. H*I");
  cmd.option<std::string>("--initial", "initial", "Start from the controls in this result or controls JSON file");
  cmd.option<int>("--checkpoint-every", "checkpoint_every", "Write checkpoint.json every N iterations (0 disables)");
  cmd.flag("--resume", "resume", "Warm-start from checkpoint.json in the output directory");
  cmd.option<double>("--require-infidelity", "require_infidelity", "Exit 1 unless the worst-case infidelity is at most this");
}

namespace {

Block resolve_block(const std::string& name) {
  if (std::filesystem::exists(name)) {
    const Json doc = read_json_file(name);
    return block_from_json(doc.contains("block") ? doc.at("block") : doc);
  }
  return reference_block(reference_block_from_string(name));
}

TargetGate resolve_target(const std::string& label) {
  std::vector<TargetGate> factors;
  std::stringstream ss(label);
  std::string part;
  while (std::getline(ss, part, '*')) factors.push_back(target_from_label(part));
  if (factors.empty()) throw std::invalid_argument("empty target label");
  return factors.size() == 1 ? factors.front() : tensor_product(factors);
}

ControlVector controls_from_document(const std::string& path) {
  const Json doc = read_json_file(path);
  if (doc.contains("result")) return controls_from_json(doc.at("result").at("controls"));
  if (doc.contains("controls")) return controls_from_json(doc.at("controls"));
  return controls_from_json(doc);
}

}  // namespace

int run_optimize(Command& cmd) {
  const Json& c = cmd.config;
  Block block;
  TargetGate target;
  UncertaintySpec spec = uncertainty_config(c);
  OptimizationConfig config = optimization_config(c);
  try {
    block = resolve_block(c.at("block").get<std::string>());
    target = resolve_target(c.at("target").get<std::string>());
    if (!c.at("initial").is_null()) {
      const std::string path = c.at("initial").get<std::string>();
      if (!std::filesystem::exists(path)) throw UsageError("initial controls file not found: " + path);
      config.initial_controls = controls_from_document(path);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  const auto checkpoint_path = cmd.output_file("checkpoint.json");
  if (c.at("resume").get<bool>()) {
    if (std::filesystem::exists(checkpoint_path)) {
      const Json cp = read_json_file(checkpoint_path.string());
      config.initial_controls = controls_from_json(cp.at("controls"));
      std::cerr << "resuming from " << checkpoint_path.string() << " (restart " << cp.at("restart") << ", iteration "
                << cp.at("iteration") << ", worst-case infidelity " << cp.at("worst_infidelity") << ")\n";
    } else {
      std::cerr << "no checkpoint at " << checkpoint_path.string() << ", starting fresh\n";
    }
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  const int every = c.at("checkpoint_every").get<int>();
  double best_seen = -1.0;
  ControlVector best_controls;
  int best_restart = 0;
  int best_iteration = 0;
  config.on_iteration = [&](const IterationInfo& info) {
    if (info.best_controls && info.min_fidelity > best_seen) {
      best_seen = info.min_fidelity;
      best_controls = *info.best_controls;
      best_restart = info.restart;
      best_iteration = info.iteration;
    }
    if (every > 0 && info.iteration > 0 && info.iteration % every == 0 && best_seen >= 0.0) {
      cmd.write_json("checkpoint.json", {{"restart", best_restart},
                                         {"iteration", best_iteration},
                                         {"worst_infidelity", 1.0 - best_seen},
                                         {"controls", to_json(best_controls)}});
      std::cerr << "restart " << info.restart << " iteration " << info.iteration << ": worst-case infidelity "
                << 1.0 - info.min_fidelity << " (best " << 1.0 - best_seen << ")\n";
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  const OptimizationResult result = optimize(block, target, spec, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool has_requirement = !c.at("require_infidelity").is_null();
  const bool ok = !has_requirement || result.worst_infidelity() <= c.at("require_infidelity").get<double>();
  cmd.write_json("result.json", {{"block", to_json(block)},
                                 {"target", target.label},
                                 {"uncertainty", to_json(spec)},
                                 {"corners", result.corner_fidelities.size()},
                                 {"requirement_met", ok},
                                 {"result", to_json(result)}});

  std::vector<std::string> header = {"bin", "t_mid"};
  for (int q : block.center) {
    header.push_back("q" + std::to_string(q) + "_x");
    header.push_back("q" + std::to_string(q) + "_y");
  }
  std::vector<std::vector<std::string>> rows;
  const ControlVector& u = result.controls;
  for (int n = 0; n < u.bins(); ++n) {
    std::vector<std::string> row = {fmt(n), fmt(u.midpoint(n))};
    for (int j = 0; j < u.channels(); ++j) {
      row.push_back(fmt(u.at(j, n, Quadrature::x)));
      row.push_back(fmt(u.at(j, n, Quadrature::y)));
    }
    rows.push_back(std::move(row));
  }
  cmd.write_csv("pulses.csv", header, rows);

  rows.clear();
  for (const auto& t : result.trace) {
    rows.push_back({fmt(t.iteration), fmt(t.min_fidelity), fmt(t.mean_fidelity), fmt(1.0 - t.min_fidelity)});
  }
  cmd.write_csv("convergence.csv", {"iteration", "min_fidelity", "mean_fidelity", "worst_infidelity"}, rows);

  rows.clear();
  for (std::size_t k = 0; k < result.corner_fidelities.size(); ++k) {
    rows.push_back({fmt(static_cast<long long>(k)), fmt(result.corner_fidelities[k]), fmt(1.0 - result.corner_fidelities[k])});
  }
  cmd.write_csv("corners.csv", {"corner", "fidelity", "infidelity"}, rows);

  std::cout << "target " << target.label << " on " << block.size() << "-qubit block, " << result.corner_fidelities.size()
            << " corners\n"
            << "worst-case infidelity " << result.worst_infidelity() << " (corner " << result.argmin_corner
            << "), mean infidelity " << 1.0 - result.mean_fidelity << '\n'
            << result.iterations << " iterations, " << result.evaluations << " evaluations, " << result.terminated_reason
            << ", " << seconds << " s\n";
  if (!ok) std::cout << "FAIL worst-case infidelity above " << c.at("require_infidelity").get<double>() << '\n';
  return ok ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
