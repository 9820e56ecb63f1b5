#include <cmath>
#include <iostream>
#include <random>

#include "cli.hpp"

namespace zzp::cli {

void setup_calibrate(Command& cmd) {
  Json d = common_defaults();
  d.update(graph_defaults());
  d.update({{"rows", 3},
            {"cols", 3},
            {"cluster", nullptr},
            {"clusters", 100},
            {"frequency_range", {80.0, 120.0}},
            {"coupling_range", {0.5, 1.5}},
            {"tolerance", 1e-12}});
  cmd.defaults = d;
  add_common_options(cmd);
  add_graph_options(cmd);
  cmd.option<std::string>("--cluster", "cluster", "Cluster JSON file: graph fields plus target and frequencies");
  cmd.option<int>("--clusters", "clusters", "Random clusters to draw when no cluster file is given");
  cmd.option<std::vector<double>>("--frequency-range", "frequency_range", "Bare frequency range in units of J")->expected(2);
  cmd.option<std::vector<double>>("--coupling-range", "coupling_range", "Random coupling range")->expected(2);
  cmd.option<double>("--tolerance", "tolerance", "Bound on the relative error of the recovered frequency");
}

namespace {

struct Case {
  QubitGraph graph;
  std::vector<double> frequencies;
  int target;
};

std::vector<Case> cases_from_config(const Command& cmd) {
  const Json& c = cmd.config;
  if (!c.at("cluster").is_null()) {
    const std::string path = c.at("cluster").get<std::string>();
    if (!std::filesystem::exists(path)) throw UsageError("cluster file not found: " + path);
    try {
      const Json doc = read_json_file(path);
      return {{graph_from_json(doc), doc.at("frequencies").get<std::vector<double>>(), doc.at("target").get<int>()}};
    } catch (const std::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  const QubitGraph base = load_graph(cmd);
  std::vector<int> targets;
  for (int q = 0; q < base.num_qubits(); ++q) {
    try {
      make_cluster(base, std::vector<double>(base.num_qubits(), 0.0), q);
      targets.push_back(q);
    } catch (const std::invalid_argument&) {
    }
  }
  if (targets.empty()) throw UsageError("graph has no qubit with three uncoupled neighbors");
  const auto fr = c.at("frequency_range").get<std::vector<double>>();
  const auto jr = c.at("coupling_range").get<std::vector<double>>();
  if (fr.size() != 2 || jr.size() != 2 || !(fr[0] <= fr[1]) || !(jr[0] <= jr[1])) throw UsageError("bad ranges");
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  std::uniform_real_distribution<double> freq(fr[0], fr[1]);
  std::uniform_real_distribution<double> coup(jr[0], jr[1]);
  std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
  std::vector<Case> out;
  const int n = c.at("clusters").get<int>();
  if (n < 1) throw UsageError("clusters must be positive");
  for (int i = 0; i < n; ++i) {
    std::vector<double> j(base.edges().size());
    for (auto& x : j) x = coup(rng);
    std::vector<double> f(base.num_qubits());
    for (auto& x : f) x = freq(rng);
    out.push_back({base.with_couplings(j), std::move(f), targets[pick(rng)]});
  }
  return out;
}

}  // namespace

int run_calibrate(Command& cmd) {
  const std::vector<Case> cases = cases_from_config(cmd);
  const double tol = cmd.config.at("tolerance").get<double>();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> peak_rows;
  double worst_rel = 0.0;
  double worst_peak = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const SpectroscopyCluster cluster = make_cluster(cases[i].graph, cases[i].frequencies, cases[i].target);
    const PeakSet formula = predict_peaks(cluster);
    const PeakSet oracle = oracle_peaks(cluster);
    double peak_diff = 0.0;
    for (int k = 0; k < 7; ++k) {
      const bool one = k < 4;
      const double f = one ? formula.one_photon[k] : formula.two_photon[k - 4];
      const double o = one ? oracle.one_photon[k] : oracle.two_photon[k - 4];
      peak_diff = std::max(peak_diff, std::abs(f - o) / std::max(1.0, std::abs(o)));
      peak_rows.push_back({fmt(static_cast<int>(i)), one ? "one_photon" : "two_photon",
                           fmt(one ? cluster.qubits[k] : cluster.qubits[k - 3]), fmt(f), fmt(o)});
    }
    const double truth = cluster.frequencies[0];
    const double recovered = recover_frequency(oracle);
    const double rel = std::abs(recovered - truth) / std::abs(truth);
    worst_rel = std::max(worst_rel, rel);
    worst_peak = std::max(worst_peak, peak_diff);
    rows.push_back({fmt(static_cast<int>(i)), fmt(cluster.qubits[0]), fmt(truth), fmt(recovered), fmt(recovered - truth),
                    fmt(rel), fmt(peak_diff)});
  }
  cmd.write_csv("calibration.csv",
                {"cluster", "target", "omega1_true", "omega1_recovered", "residual", "relative_error", "peak_mismatch"},
                rows);
  cmd.write_csv("peaks.csv", {"cluster", "kind", "qubit", "formula", "oracle"}, peak_rows);
  const bool ok = worst_rel <= tol && worst_peak <= tol;
  cmd.write_json("calibration.json", {{"clusters", cases.size()},
                                      {"max_relative_error", worst_rel},
                                      {"max_peak_mismatch", worst_peak},
                                      {"tolerance", tol},
                                      {"passed", ok}});
  std::cout << cases.size() << " clusters: max relative error " << worst_rel << ", max formula/oracle peak mismatch "
            << worst_peak << (ok ? "" : " FAIL") << '\n';
  return ok ? kExitOk : kExitFailure;
}

}  // namespace zzp::cli
