#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "zzpulse/io.hpp"

using namespace zzp;

TEST_CASE("graph round trip") {
  for (const QubitGraph& g : {build_honeycomb(2, 2, 0.9), build_square(3, 3), build_chain(5),
                              QubitGraph(3, {{0, 1, 0.5}, {1, 2, 1.5}})}) {
    const QubitGraph back = graph_from_json(Json::parse(to_json(g).dump()));
    CHECK(back.num_qubits() == g.num_qubits());
    CHECK(back.geometry() == g.geometry());
    CHECK(back.coords() == g.coords());
    REQUIRE(back.edges().size() == g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      CHECK(back.edges()[e].a == g.edges()[e].a);
      CHECK(back.edges()[e].b == g.edges()[e].b);
      CHECK(back.edges()[e].coupling == g.edges()[e].coupling);
    }
    if (g.geometry() != Geometry::custom) {
      CHECK(single_qubit_pattern(back) == single_qubit_pattern(g));
    }
  }
  const QubitGraph unit = graph_from_json(Json::parse(R"({"num_qubits": 2, "edges": [[0, 1]]})"));
  CHECK(unit.coupling(0, 1) == 1.0);
  CHECK(unit.geometry() == Geometry::custom);
  CHECK_THROWS(graph_from_json(Json::parse(R"({"num_qubits": 2, "edges": [[0]]})")));
  CHECK_THROWS(graph_from_json(Json::parse(R"({"num_qubits": 2, "edges": [[0, 2, 1.0]]})")));
}

TEST_CASE("pattern and block round trip") {
  const QubitGraph g = build_honeycomb(1, 2);
  const DrivingPattern p = two_qubit_pattern(g, {g.edges()[2].a, g.edges()[2].b});
  CHECK(pattern_from_json(to_json(p)) == p);
  const Block b = decompose_blocks(g, p).front();
  const Block back = block_from_json(to_json(b));
  CHECK(back.center == b.center);
  CHECK(back.boundary == b.boundary);
  CHECK(back.couplings.size() == b.couplings.size());
  CHECK(to_json(back) == to_json(b));
}

TEST_CASE("controls, config and result round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  ControlVector c(2.5, 7, 2);
  for (auto& v : c.values()) v = u(rng);
  const ControlVector c2 = controls_from_json(Json::parse(to_json(c).dump()));
  CHECK(c2.values() == c.values());
  CHECK(c2.duration() == c.duration());
  CHECK(c2.bins() == 7);
  CHECK_THROWS(controls_from_json(Json::parse(R"({"duration": 1, "bins": 2, "channels": 1, "values": [1, 2, 3]})")));

  OptimizationConfig cfg;
  cfg.bins = 7;
  cfg.algorithm = Algorithm::avg_quasi_newton;
  cfg.seed = 0xFFFFFFFFFFFFull;
  cfg.corner_set = CornerSet::resolution_iv;
  cfg.initial_controls = c;
  const OptimizationConfig cfg2 = config_from_json(Json::parse(to_json(cfg).dump()));
  CHECK(to_json(cfg2) == to_json(cfg));
  const OptimizationConfig partial = config_from_json(Json::parse(R"({"bins": 12, "algorithm": "scp"})"));
  CHECK(partial.bins == 12);
  CHECK(partial.algorithm == Algorithm::scp_minimax);
  CHECK(partial.omega_max == OptimizationConfig{}.omega_max);
  CHECK_THROWS(config_from_json(Json::parse(R"({"algorithm": "newton"})")));

  const UncertaintySpec s{0.01, 0.02, 0.003, 2.0};
  CHECK(to_json(uncertainty_from_json(to_json(s))) == to_json(s));
  CHECK_THROWS(uncertainty_from_json(Json::parse(R"({"coupling_frac": -1})")));

  OptimizationResult r;
  r.controls = c;
  r.corner_fidelities = {0.9, 0.8, 0.95, 0.85};
  r.min_fidelity = 0.8;
  r.argmin_corner = 1;
  r.mean_fidelity = 0.875;
  r.iterations = 4;
  r.evaluations = 9;
  r.trace = {{0, 0.5, 0.6}, {1, 0.8, 0.875}};
  r.terminated_reason = "stationary";
  const Json j = to_json(r);
  CHECK(j["corner_fidelities"]["1"] == 0.8);
  const OptimizationResult r2 = result_from_json(Json::parse(j.dump()));
  CHECK(r2.corner_fidelities == r.corner_fidelities);
  CHECK(r2.trace.size() == 2);
  CHECK(r2.trace[1].mean_fidelity == 0.875);
  CHECK(to_json(r2) == j);
}

TEST_CASE("pulse library round trip") {
  const QubitGraph g = build_chain(5);
  const auto blocks = decompose_blocks(g, single_qubit_pattern(g));
  PulseLibrary lib;
  lib.add("H", block_shape(blocks[0]), ControlVector(1.0, 3, 1, {1, 2, 3, 4, 5, 6}));
  lib.add("T", block_shape(blocks[1]), ControlVector(1.0, 3, 1, {6, 5, 4, 3, 2, 1}));
  const PulseLibrary back = library_from_json(Json::parse(to_json(lib).dump()));
  CHECK(back.size() == 2);
  CHECK(back.lookup("T", block_shape(blocks[1])).values() == lib.lookup("T", block_shape(blocks[1])).values());
}

TEST_CASE("json files") {
  const auto path = (std::filesystem::temp_directory_path() / "zzpulse_io_test.json").string();
  write_json_file(path, Json{{"a", 1}});
  CHECK(read_json_file(path)["a"] == 1);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_json_file(path), std::runtime_error);
}
