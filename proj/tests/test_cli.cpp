#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "zzpulse/io.hpp"

using namespace zzp;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("zzpulse_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run zzpulse(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string(ZZPULSE_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string dir(const std::string& name) { return (workdir() / name).string(); }

// Drops the two degree-1 ends of a two-hexagon strip: eight qubits, central bond of degree-3 ends.
std::string write_patch8() {
  const QubitGraph full = build_honeycomb(1, 2);
  std::vector<int> keep;
  for (int q = 1; q + 1 < full.num_qubits(); ++q) keep.push_back(q);
  const std::string path = dir("patch8.json");
  write_json_file(path, to_json(induced_subgraph(full, keep)));
  return path;
}

std::pair<int, int> central_bond(const QubitGraph& g) {
  for (const auto& e : g.edges()) {
    if (g.degree(e.a) == 3 && g.degree(e.b) == 3) return {e.a, e.b};
  }
  return {-1, -1};
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const Run missing = zzpulse("optimize --config " + dir("no_such_config.json"));
  CHECK(missing.status == 2);
  CHECK(missing.err.find("no_such_config.json") != std::string::npos);
  CHECK(zzpulse("optimize --no-such-flag").status == 2);
  CHECK(zzpulse("").status == 2);
  CHECK(zzpulse("optimize --target NOTAGATE -o " + dir("bad")).status == 2);
  CHECK(zzpulse("optimize --algorithm newton -o " + dir("bad")).status == 2);
  write_json_file(dir("typo.json"), Json{{"binz", 3}});
  const Run typo = zzpulse("optimize --config " + dir("typo.json"));
  CHECK(typo.status == 2);
  CHECK(typo.err.find("binz") != std::string::npos);
  CHECK(zzpulse("compile --circuit " + dir("missing.txt")).status == 2);
  CHECK(zzpulse("--version").out.find("0.") == 0);
}

TEST_CASE("lattice and validate") {
  REQUIRE(zzpulse("lattice --geometry honeycomb --rows 4 --cols 4 -o " + dir("lat")).status == 0);
  const Json lat = read_json_file(dir("lat") + "/lattice.json");
  CHECK(lat["num_qubits"] == 48);
  CHECK(lat["violations"].empty());
  CHECK(fs::exists(dir("lat") + "/qubits.csv"));

  const Run ok = zzpulse("validate --graph " + dir("lat") + "/lattice.json -o " + dir("val"));
  CHECK(ok.status == 0);
  CHECK(read_json_file(dir("val") + "/validate.json")["valid"] == true);

  // Every undriven qubit has a driven neighbor, so driving one more creates an adjacent pair.
  Json bad = lat;
  const auto driven = lat["driven"].get<std::vector<int>>();
  int extra = 0;
  while (std::find(driven.begin(), driven.end(), extra) != driven.end()) ++extra;
  bad["driven"].push_back(extra);
  write_json_file(dir("corrupt.json"), bad);
  const Run fail = zzpulse("validate --graph " + dir("corrupt.json") + " -o " + dir("val_bad"));
  CHECK(fail.status == 1);
  CHECK(fail.out.find("adjacent_driven_outside_gate_pair") != std::string::npos);

  const std::string patch = write_patch8();
  const Run eq = zzpulse("validate --graph " + patch + " --bins 6 -o " + dir("val8"));
  CHECK(eq.status == 0);
  const Json report = read_json_file(dir("val8") + "/validate.json");
  for (const auto& check : report["checks"]) {
    CHECK(check["status"] == "pass");
    if (check["check"] == "evolution") CHECK(check["value"].get<double>() <= 1e-10);
  }
}

TEST_CASE("optimize writes reproducible artifacts") {
  const std::string args = "optimize --block honeycomb-1q --target I --uncertainty 0 0 0 --max-evaluations 300 --seed 7 ";
  REQUIRE(zzpulse(args + "-o " + dir("opt_a")).status == 0);
  REQUIRE(zzpulse(args + "-o " + dir("opt_b")).status == 0);
  const Json a = read_json_file(dir("opt_a") + "/result.json");
  CHECK(a["version"].is_string());
  CHECK(a["seed"] == 7);
  CHECK(a["config"]["max_evaluations"] == 300);
  CHECK(a["result"]["worst_infidelity"].get<double>() <= 1e-8);
  CHECK(a["result"]["corner_fidelities"].size() == 32);
  Json b = read_json_file(dir("opt_b") + "/result.json");
  b["config"]["output"] = a["config"]["output"];
  CHECK(a == b);
  const std::string pulses = slurp(dir("opt_a") + "/pulses.csv");
  const std::string pulses_b = slurp(dir("opt_b") + "/pulses.csv");
  CHECK(pulses.substr(pulses.find("bin,")) == pulses_b.substr(pulses_b.find("bin,")));
  CHECK(pulses.rfind("# zzpulse", 0) == 0);
  CHECK(pulses.find("# seed: 7") != std::string::npos);
  CHECK(pulses.find("bin,t_mid,q") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : pulses) lines += ch == '\n';
  CHECK(lines == 3 + 1 + 100);
  CHECK(slurp(dir("opt_a") + "/convergence.csv").find("iteration,min_fidelity,mean_fidelity") != std::string::npos);

  // Config file values apply; flags override them.
  write_json_file(dir("opt.json"), Json{{"bins", 20}, {"max_evaluations", 5}, {"target", "H"}});
  REQUIRE(zzpulse("optimize --config " + dir("opt.json") + " --max-evaluations 8 -o " + dir("opt_c")).status == 0);
  const Json c = read_json_file(dir("opt_c") + "/result.json");
  CHECK(c["config"]["bins"] == 20);
  CHECK(c["config"]["max_evaluations"] == 8);
  CHECK(c["result"]["controls"]["bins"] == 20);
  CHECK(c["result"]["evaluations"] == 8);
}

TEST_CASE("optimize checkpoints and resumes") {
  const std::string args = "optimize --target H --bins 30 --uncertainty 0.01 0.01 0.001 --checkpoint-every 5 -o " + dir("ckpt");
  REQUIRE(zzpulse(args + " --max-evaluations 40").status == 0);
  REQUIRE(fs::exists(dir("ckpt") + "/checkpoint.json"));
  const Json cp = read_json_file(dir("ckpt") + "/checkpoint.json");
  const double first = read_json_file(dir("ckpt") + "/result.json")["result"]["worst_infidelity"];
  const Run resumed = zzpulse(args + " --max-evaluations 40 --resume");
  CHECK(resumed.status == 0);
  CHECK(resumed.err.find("resuming") != std::string::npos);
  const double second = read_json_file(dir("ckpt") + "/result.json")["result"]["worst_infidelity"];
  CHECK(second < cp["worst_infidelity"].get<double>());
  CHECK(second < first);
  CHECK(zzpulse(args + " --max-evaluations 5 --require-infidelity 1e-12").status == 1);
}

TEST_CASE("calibrate, compile and simulate") {
  const Run cal = zzpulse("calibrate --clusters 100 --seed 3 -o " + dir("cal"));
  CHECK(cal.status == 0);
  const Json cj = read_json_file(dir("cal") + "/calibration.json");
  CHECK(cj["max_relative_error"].get<double>() <= 1e-12);

  const std::string patch = write_patch8();
  const QubitGraph g = graph_from_json(read_json_file(patch));
  const auto [a, b] = central_bond(g);
  REQUIRE(a >= 0);
  {
    std::ofstream(dir("circuit.txt")) << "CNOT " << a << ' ' << b << "\nH " << a << "\nT " << b << '\n';
    std::ofstream(dir("empty.txt")) << "# nothing\n";
  }
  const Run comp = zzpulse("compile --graph " + patch + " --circuit " + dir("circuit.txt") + " -o " + dir("comp"));
  CHECK(comp.status == 0);
  const Json sched = read_json_file(dir("comp") + "/schedule.json");
  CHECK(sched["schedule"]["step_count"] == 3);
  CHECK(sched["report"]["valid"] == true);

  const Run sim = zzpulse("simulate --graph " + patch + " --circuit " + dir("empty.txt") + " -o " + dir("sim0"));
  CHECK(sim.status == 0);
  CHECK(read_json_file(dir("sim0") + "/simulate.json")["process_fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

  // A barely optimized library misses the fidelity requirement.
  std::ofstream(dir("idle.txt")) << "H 0\n";
  const Run idle = zzpulse("simulate --graph " + patch + " --circuit " + dir("idle.txt") +
                           " --bins 20 --max-evaluations 3 --min-fidelity 0.9999 -o " + dir("sim1"));
  CHECK(idle.status == 1);
  CHECK(fs::exists(dir("sim1") + "/library.json"));
}
