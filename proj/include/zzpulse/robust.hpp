#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "zzpulse/hamiltonian.hpp"
#include "zzpulse/lattice.hpp"
#include "zzpulse/propagation.hpp"

namespace zzp {

/// Full interval widths of the uncertain parameters. Couplings vary in
/// J_e +- coupling_frac * nominal / 2, amplitude scales in 1 +- amplitude_frac / 2
/// and detunings in +- detuning_frac * nominal / 2.
struct UncertaintySpec {
  double coupling_frac = 0.0;
  double amplitude_frac = 0.0;
  double detuning_frac = 0.0;
  double nominal = 1.0;

  void validate() const;
  bool is_zero() const { return coupling_frac == 0.0 && amplitude_frac == 0.0 && detuning_frac == 0.0; }
};

inline constexpr int kMaxUncertainParameters = 24;

/// Number of uncertain parameters: one per coupling, then one amplitude
/// scale and one detuning per center qubit.
int uncertain_parameter_count(const Block& block);

/// All 2^n_u extreme points. Corner k sets parameter i (couplings, then
/// amplitude scales, then detunings) to its upper value iff bit i of k is set.
std::vector<ParameterPoint> hypercube_corners(const Block& block, const UncertaintySpec& spec);

/// Point inside the box: `unit` holds one coordinate in [-1, 1] per
/// uncertain parameter, in corner bit order.
ParameterPoint interior_point(const Block& block, const UncertaintySpec& spec, const std::vector<double>& unit);

/// Evaluates every point (concurrently when threads > 1). Identical points
/// are propagated once. Results are in input order.
std::vector<FidelityEvaluation> evaluate_points(const Block& block, const ControlVector& controls,
                                                const std::vector<ParameterPoint>& points, const TargetGate& target,
                                                bool with_gradient, int threads = 1);

struct WorstCase {
  double min_fidelity = 0.0;
  int argmin = 0;  // first index attaining the minimum
  double mean_fidelity = 0.0;
  std::vector<double> fidelities;
};

WorstCase worst_case_fidelity(const Block& block, const ControlVector& controls,
                              const std::vector<ParameterPoint>& corners, const TargetGate& target, int threads = 1);

/// Corner bitmasks of a two-level fractional factorial of resolution IV:
/// every parameter column is an odd-size product of base columns. Its mean
/// matches the full hypercube mean for all multilinear terms of order <= 3.
/// Returns every corner when the fraction would not be smaller.
std::vector<std::uint32_t> resolution_iv_corners(int num_parameters);

enum class Algorithm { scp_minimax, avg_quasi_newton };

/// Corners the optimizer iterates on; results always cover every corner.
enum class CornerSet { all, resolution_iv };

std::string to_string(CornerSet c);
CornerSet corner_set_from_string(const std::string& s);

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct IterationInfo {
  int restart = 0;
  int iteration = 0;
  double min_fidelity = 0.0;
  double mean_fidelity = 0.0;
  double trust_region = 0.0;  // SCP only
  const ControlVector* best_controls = nullptr;
};

struct OptimizationConfig {
  int bins = 100;
  double duration = 2.0 * std::numbers::pi;
  double omega_max = 10.0;
  Algorithm algorithm = Algorithm::scp_minimax;
  int max_iterations = 500;       // SCP iterations
  int max_evaluations = 2000;     // objective evaluations per restart (avg)
  double step_tolerance = 1e-8;   // SCP stops when the trust region falls below this
  double trust_region_init = 0.05;
  double growth = 1.15;
  double shrink = 2.0;
  std::uint64_t seed = 1;
  int num_restarts = 1;
  double init_amplitude = 0.5;    // random start uniform in [-a, a]
  double target_infidelity = 0.0; // stop once 1 - F_min reaches this
  int threads = 1;
  CornerSet corner_set = CornerSet::all;
  std::optional<ControlVector> initial_controls;  // replaces the first random start
  std::function<void(const IterationInfo&)> on_iteration;

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double min_fidelity = 0.0;
  double mean_fidelity = 0.0;
};

struct OptimizationResult {
  ControlVector controls;
  std::vector<double> corner_fidelities;  // indexed by corner bitmask
  double min_fidelity = 0.0;
  int argmin_corner = 0;
  double mean_fidelity = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int best_restart = 0;
  std::vector<TracePoint> trace;  // best restart, over the optimization corner set
  std::string terminated_reason;

  double worst_infidelity() const { return 1.0 - min_fidelity; }
};

ControlVector random_controls(const Block& block, const OptimizationConfig& config, std::uint64_t seed);

/// Trust-region sequential linear programming on the worst corner fidelity.
OptimizationResult optimize_scp(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                                const OptimizationConfig& config);

/// Projected L-BFGS on the mean corner fidelity under |Omega| <= omega_max.
OptimizationResult optimize_avg(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                                const OptimizationConfig& config);

/// Dispatches on config.algorithm.
OptimizationResult optimize(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                            const OptimizationConfig& config);

/// 1 - N' T / T2, clamped at 0.
double coherence_bound(double duration, double t2, int block_size);

}  // namespace zzp
