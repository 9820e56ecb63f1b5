#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "zzpulse/robust.hpp"

using namespace zzp;

namespace {

Block one_qubit_block() { return reference_block(ReferenceBlock::honeycomb_1q); }
Block two_qubit_block() { return reference_block(ReferenceBlock::honeycomb_2q); }

OptimizationConfig quick_config() {
  OptimizationConfig cfg;
  cfg.bins = 40;
  cfg.max_iterations = 60;
  cfg.max_evaluations = 80;
  return cfg;
}

std::vector<double> flatten(const ParameterPoint& p) {
  std::vector<double> v = p.couplings;
  v.insert(v.end(), p.amplitude_scales.begin(), p.amplitude_scales.end());
  v.insert(v.end(), p.detunings.begin(), p.detunings.end());
  return v;
}

}  // namespace

TEST_CASE("corner counts") {
  const UncertaintySpec spec{0.01, 0.01, 0.001};
  CHECK(hypercube_corners(one_qubit_block(), spec).size() == 32);
  CHECK(hypercube_corners(two_qubit_block(), spec).size() == 512);
  CHECK(uncertain_parameter_count(two_qubit_block()) == 9);
}

TEST_CASE("zero uncertainty collapses to the nominal point") {
  const Block b = one_qubit_block();
  const auto corners = hypercube_corners(b, UncertaintySpec{});
  std::set<std::vector<double>> distinct;
  for (const auto& c : corners) distinct.insert(flatten(c));
  REQUIRE(distinct.size() == 1);
  CHECK(*distinct.begin() == flatten(nominal_parameters(b)));
}

TEST_CASE("corner enumeration order and values") {
  const Block b = one_qubit_block();  // 3 couplings, 1 alpha, 1 delta
  const UncertaintySpec spec{0.1, 0.2, 0.04, 2.0};
  const auto corners = hypercube_corners(b, spec);
  const std::vector<double> lower = {b.couplings[0].coupling - 0.1, b.couplings[1].coupling - 0.1,
                                     b.couplings[2].coupling - 0.1, 0.9, -0.04};
  const std::vector<double> upper = {b.couplings[0].coupling + 0.1, b.couplings[1].coupling + 0.1,
                                     b.couplings[2].coupling + 0.1, 1.1, 0.04};
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const auto v = flatten(corners[k]);
    for (int i = 0; i < 5; ++i) {
      const double expected = ((k >> i) & 1u) ? upper[i] : lower[i];
      CHECK(v[i] == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("interior points span the box") {
  const Block b = one_qubit_block();
  const UncertaintySpec spec{0.1, 0.2, 0.04};
  const auto corners = hypercube_corners(b, spec);
  CHECK(flatten(interior_point(b, spec, {-1, -1, -1, -1, -1})) == flatten(corners[0]));
  CHECK(flatten(interior_point(b, spec, {1, -1, 1, -1, 1})) == flatten(corners[0b10101]));
  CHECK(flatten(interior_point(b, spec, {0, 0, 0, 0, 0})) == flatten(nominal_parameters(b)));
  CHECK_THROWS_AS(interior_point(b, spec, {0, 0, 0, 0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(interior_point(b, spec, {0, 0}), std::invalid_argument);
}

TEST_CASE("parameter explosion guard") {
  Block big;
  big.center = {0};
  for (int q = 1; q <= 23; ++q) {
    big.boundary.push_back(q);
    big.couplings.push_back({0, q, 1.0});
  }
  CHECK(uncertain_parameter_count(big) == 25);
  CHECK_THROWS_AS(hypercube_corners(big, UncertaintySpec{0.01, 0.01, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(hypercube_corners(one_qubit_block(), UncertaintySpec{-0.1, 0, 0}), std::invalid_argument);
}

TEST_CASE("worst case over corners") {
  const Block b = one_qubit_block();
  OptimizationConfig cfg;
  const ControlVector c = random_controls(b, cfg, 5);
  const TargetGate h = target_from_label("H");

  SUBCASE("zero uncertainty equals nominal fidelity") {
    const auto wc = worst_case_fidelity(b, c, hypercube_corners(b, UncertaintySpec{}), h);
    const double nominal = evaluate_fidelity(b, c, nominal_parameters(b), h, false).fidelity;
    CHECK(wc.min_fidelity == nominal);
    CHECK(wc.mean_fidelity == doctest::Approx(nominal).epsilon(1e-15));
  }
  SUBCASE("min <= mean <= max and argmin is consistent") {
    const auto corners = hypercube_corners(b, UncertaintySpec{0.05, 0.05, 0.01});
    const auto wc = worst_case_fidelity(b, c, corners, h);
    const double fmax = *std::max_element(wc.fidelities.begin(), wc.fidelities.end());
    CHECK(wc.min_fidelity <= wc.mean_fidelity);
    CHECK(wc.mean_fidelity <= fmax);
    CHECK(wc.fidelities[wc.argmin] == wc.min_fidelity);
    for (std::size_t k = 0; k < corners.size(); ++k) {
      CHECK(wc.fidelities[k] == evaluate_fidelity(b, c, corners[k], h, false).fidelity);
    }
  }
  SUBCASE("a zero-width dimension pairs up equal fidelities") {
    const auto corners = hypercube_corners(b, UncertaintySpec{0.05, 0.0, 0.01});
    const auto wc = worst_case_fidelity(b, c, corners, h);
    const unsigned alpha_bit = 1u << 3;
    for (unsigned k = 0; k < corners.size(); ++k) CHECK(wc.fidelities[k] == wc.fidelities[k ^ alpha_bit]);
  }
  SUBCASE("threaded evaluation is bit-identical") {
    const auto corners = hypercube_corners(b, UncertaintySpec{0.05, 0.05, 0.01});
    const auto serial = evaluate_points(b, c, corners, h, true, 1);
    const auto threaded = evaluate_points(b, c, corners, h, true, 3);
    for (std::size_t k = 0; k < corners.size(); ++k) {
      CHECK(serial[k].fidelity == threaded[k].fidelity);
      CHECK(serial[k].gradient == threaded[k].gradient);
    }
  }
  CHECK_THROWS_AS(worst_case_fidelity(b, c, {}, h), std::invalid_argument);
}

TEST_CASE("scp reaches the ideal Hadamard") {
  const Block b = one_qubit_block();
  OptimizationConfig cfg;
  cfg.algorithm = Algorithm::scp_minimax;
  const auto r = optimize(b, target_from_label("H"), UncertaintySpec{}, cfg);
  CHECK(r.worst_infidelity() <= 1e-8);
  CHECK(r.controls.max_abs() <= cfg.omega_max + 1e-12);
  CHECK(r.corner_fidelities.size() == 32);
  CHECK(r.min_fidelity == *std::min_element(r.corner_fidelities.begin(), r.corner_fidelities.end()));
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].min_fidelity >= r.trace[i - 1].min_fidelity);
    CHECK(r.trace[i].iteration > r.trace[i - 1].iteration);
  }

  SUBCASE("restarting at the optimum only shrinks the trust region") {
    OptimizationConfig again = cfg;
    again.initial_controls = r.controls;
    again.max_iterations = 200;
    const auto r2 = optimize(b, target_from_label("H"), UncertaintySpec{}, again);
    CHECK(r2.terminated_reason == "trust region below tolerance");
    CHECK(r2.min_fidelity >= r.min_fidelity);
    CHECK(r2.iterations < 60);
  }
}

TEST_CASE("scp on a robust problem") {
  const Block b = one_qubit_block();
  OptimizationConfig cfg = quick_config();
  cfg.algorithm = Algorithm::scp_minimax;
  cfg.omega_max = 0.7;
  const UncertaintySpec spec{0.05, 0.05, 0.01};
  int callbacks = 0;
  cfg.on_iteration = [&](const IterationInfo& info) {
    ++callbacks;
    CHECK(info.best_controls != nullptr);
    CHECK(info.trust_region > 0.0);
  };
  const auto r = optimize(b, target_from_label("H"), spec, cfg);
  CHECK(callbacks == r.iterations);
  CHECK(r.controls.max_abs() <= cfg.omega_max + 1e-12);
  CHECK(r.trace.front().min_fidelity < r.min_fidelity);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].min_fidelity > r.trace[i - 1].min_fidelity);
  const auto wc = worst_case_fidelity(b, r.controls, hypercube_corners(b, spec), target_from_label("H"));
  CHECK(wc.min_fidelity == r.min_fidelity);
  CHECK(wc.fidelities == r.corner_fidelities);
}

TEST_CASE("avg optimizer") {
  const Block b = one_qubit_block();
  const TargetGate t = target_from_label("T");
  const UncertaintySpec spec{0.02, 0.02, 0.002};
  OptimizationConfig cfg = quick_config();
  cfg.algorithm = Algorithm::avg_quasi_newton;

  SUBCASE("accepted steps never lower the mean fidelity") {
    const auto r = optimize(b, t, spec, cfg);
    CHECK(r.evaluations <= cfg.max_evaluations);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].mean_fidelity >= r.trace[i - 1].mean_fidelity);
    CHECK(r.trace.back().mean_fidelity > r.trace.front().mean_fidelity);
    CHECK(r.min_fidelity <= r.mean_fidelity);
  }
  SUBCASE("box constraint holds when it binds") {
    cfg.omega_max = 0.55;
    const auto r = optimize(b, t, spec, cfg);
    CHECK(r.controls.max_abs() <= cfg.omega_max + 1e-12);
    CHECK(r.controls.max_abs() == doctest::Approx(cfg.omega_max));
  }
  SUBCASE("determinism") {
    const auto r1 = optimize(b, t, spec, cfg);
    const auto r2 = optimize(b, t, spec, cfg);
    CHECK(r1.controls.values() == r2.controls.values());
    CHECK(r1.corner_fidelities == r2.corner_fidelities);
    cfg.threads = 2;
    const auto r3 = optimize(b, t, spec, cfg);
    CHECK(r1.controls.values() == r3.controls.values());
  }
  SUBCASE("more restarts never do worse") {
    const auto single = optimize(b, t, spec, cfg);
    cfg.num_restarts = 3;
    const auto multi = optimize(b, t, spec, cfg);
    CHECK(multi.min_fidelity >= single.min_fidelity);
    CHECK(multi.evaluations > single.evaluations);
    CHECK(multi.best_restart >= 0);
    CHECK(multi.best_restart < 3);
  }
}

TEST_CASE("idle block with identity target is already optimal") {
  Block b;
  b.center = {0};
  b.boundary = {1};
  b.couplings = {{0, 1, 0.0}};
  OptimizationConfig cfg = quick_config();
  cfg.algorithm = Algorithm::avg_quasi_newton;
  cfg.init_amplitude = 0.0;
  const auto r = optimize(b, target_from_label("I"), UncertaintySpec{}, cfg);
  CHECK(r.mean_fidelity == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.evaluations == 1);
  CHECK(r.terminated_reason == "stationary");
}

TEST_CASE("optimizer input checks") {
  const Block b = one_qubit_block();
  OptimizationConfig cfg;
  CHECK_THROWS_AS(optimize(b, target_from_label("CNOT"), UncertaintySpec{}, cfg), std::invalid_argument);
  cfg.growth = 1.0;
  CHECK_THROWS_AS(optimize(b, target_from_label("H"), UncertaintySpec{}, cfg), std::invalid_argument);
  cfg = OptimizationConfig{};
  cfg.omega_max = 0.1;  // below the initial amplitude
  CHECK_THROWS_AS(optimize(b, target_from_label("H"), UncertaintySpec{}, cfg), std::invalid_argument);
  cfg = OptimizationConfig{};
  cfg.initial_controls = ControlVector(cfg.duration, 10, 1);
  CHECK_THROWS_AS(optimize(b, target_from_label("H"), UncertaintySpec{}, cfg), std::invalid_argument);
  CHECK(algorithm_from_string("avg") == Algorithm::avg_quasi_newton);
  CHECK(algorithm_from_string(to_string(Algorithm::scp_minimax)) == Algorithm::scp_minimax);
  CHECK_THROWS_AS(algorithm_from_string("newton"), std::invalid_argument);
}

TEST_CASE("coherence bound") {
  CHECK(coherence_bound(0.0, 50.0, 4) == 1.0);
  CHECK(coherence_bound(0.25, 100.0, 4) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(coherence_bound(100.0 / 6.0, 100.0, 6) == doctest::Approx(0.0).scale(1.0));
  CHECK(coherence_bound(20.0, 100.0, 6) == 0.0);
  CHECK_THROWS_AS(coherence_bound(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("resolution IV corner fraction") {
  CHECK(resolution_iv_corners(9).size() == 32);
  for (int n = 1; n <= 3; ++n) CHECK(resolution_iv_corners(n).size() == (std::size_t{1} << n));
  CHECK(resolution_iv_corners(4).size() == 8);
  for (int n : {4, 5, 9, 12, 16}) {
    const auto rows = resolution_iv_corners(n);
    CHECK(std::set<std::uint32_t>(rows.begin(), rows.end()).size() == rows.size());
    CHECK(rows.size() < (std::size_t{1} << n));
    // Every monomial of degree 1..3 in the +-1 levels averages to zero, as on the full cube.
    auto level = [](std::uint32_t row, int i) { return (row >> i) & 1u ? 1.0 : -1.0; };
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        for (int c = b; c < n; ++c) {
          double sum = 0.0;
          for (auto r : rows) {
            double m = level(r, a);
            if (b != a) m *= level(r, b);
            if (c != b) m *= level(r, c);
            sum += m;
          }
          worst = std::max(worst, std::abs(sum));
        }
      }
    }
    CHECK(worst == 0.0);
  }
}

TEST_CASE("optimizing on the fraction still reports every corner") {
  OptimizationConfig cfg = quick_config();
  cfg.algorithm = Algorithm::avg_quasi_newton;
  cfg.corner_set = CornerSet::resolution_iv;
  cfg.max_evaluations = 20;
  const UncertaintySpec spec{0.02, 0.02, 0.002};
  const Block block = one_qubit_block();
  const TargetGate h = target_from_label("H");
  const OptimizationResult r = optimize(block, h, spec, cfg);
  REQUIRE(r.corner_fidelities.size() == 32);
  const WorstCase wc = worst_case_fidelity(block, r.controls, hypercube_corners(block, spec), h);
  CHECK(r.min_fidelity == doctest::Approx(wc.min_fidelity).epsilon(1e-14));
  CHECK(r.argmin_corner == wc.argmin);
}
