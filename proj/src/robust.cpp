#include "zzpulse/robust.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "zzpulse/lp.hpp"

namespace zzp {

void UncertaintySpec::validate() const {
  const double fr[] = {coupling_frac, amplitude_frac, detuning_frac};
  for (double f : fr) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("uncertainty fractions must be finite and >= 0");
  }
  if (!(nominal > 0.0) || !std::isfinite(nominal)) throw std::invalid_argument("nominal coupling must be positive");
  if (amplitude_frac >= 2.0) throw std::invalid_argument("amplitude_frac must be < 2 (scales stay positive)");
}

int uncertain_parameter_count(const Block& block) {
  return static_cast<int>(block.couplings.size()) + 2 * block.num_center();
}

namespace {

// Half-widths in corner bit order.
std::vector<double> half_widths(const Block& block, const UncertaintySpec& spec) {
  std::vector<double> h;
  for (std::size_t e = 0; e < block.couplings.size(); ++e) h.push_back(0.5 * spec.coupling_frac * spec.nominal);
  for (int j = 0; j < block.num_center(); ++j) h.push_back(0.5 * spec.amplitude_frac);
  for (int j = 0; j < block.num_center(); ++j) h.push_back(0.5 * spec.detuning_frac * spec.nominal);
  return h;
}

ParameterPoint offset_point(const Block& block, const std::vector<double>& offsets) {
  ParameterPoint p = nominal_parameters(block);
  std::size_t i = 0;
  for (auto& j : p.couplings) j += offsets[i++];
  for (auto& a : p.amplitude_scales) a += offsets[i++];
  for (auto& d : p.detunings) d += offsets[i++];
  return p;
}

}  // namespace

std::vector<ParameterPoint> hypercube_corners(const Block& block, const UncertaintySpec& spec) {
  spec.validate();
  const int nu = uncertain_parameter_count(block);
  if (nu > kMaxUncertainParameters) {
    throw std::invalid_argument("hypercube_corners: " + std::to_string(nu) + " uncertain parameters exceeds " +
                                std::to_string(kMaxUncertainParameters));
  }
  const std::vector<double> h = half_widths(block, spec);
  std::vector<ParameterPoint> corners;
  corners.reserve(std::size_t{1} << nu);
  std::vector<double> offsets(nu);
  for (std::uint32_t k = 0; k < (std::uint32_t{1} << nu); ++k) {
    for (int i = 0; i < nu; ++i) offsets[i] = ((k >> i) & 1u) ? h[i] : -h[i];
    corners.push_back(offset_point(block, offsets));
  }
  return corners;
}

ParameterPoint interior_point(const Block& block, const UncertaintySpec& spec, const std::vector<double>& unit) {
  spec.validate();
  const std::vector<double> h = half_widths(block, spec);
  if (unit.size() != h.size()) throw std::invalid_argument("interior_point: coordinate count mismatch");
  std::vector<double> offsets(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(std::abs(unit[i]) <= 1.0)) throw std::invalid_argument("interior_point: coordinates must lie in [-1, 1]");
    offsets[i] = unit[i] * h[i];
  }
  return offset_point(block, offsets);
}

namespace {

using PointKey = std::vector<double>;

PointKey key_of(const ParameterPoint& p) {
  PointKey k = p.couplings;
  k.insert(k.end(), p.amplitude_scales.begin(), p.amplitude_scales.end());
  k.insert(k.end(), p.detunings.begin(), p.detunings.end());
  return k;
}

// Distinct points and, for each input, the index of its representative.
struct Deduplicated {
  std::vector<int> representative;  // into points
  std::vector<int> unique;          // indices of first occurrences
};

Deduplicated deduplicate(const std::vector<ParameterPoint>& points) {
  Deduplicated d;
  std::map<PointKey, int> seen;
  d.representative.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(key_of(points[i]), static_cast<int>(d.unique.size()));
    if (inserted) d.unique.push_back(static_cast<int>(i));
    d.representative[i] = it->second;
  }
  return d;
}

}  // namespace

std::vector<FidelityEvaluation> evaluate_points(const Block& block, const ControlVector& controls,
                                                const std::vector<ParameterPoint>& points, const TargetGate& target,
                                                bool with_gradient, int threads) {
  const Deduplicated dd = deduplicate(points);
  const int nu = static_cast<int>(dd.unique.size());
  std::vector<FidelityEvaluation> unique_results(nu);
  auto work = [&](int i) {
    unique_results[i] = evaluate_fidelity(block, controls, points[dd.unique[i]], target, with_gradient);
  };
  const int workers = std::clamp(threads, 1, std::max(1, nu));
  if (workers == 1) {
    for (int i = 0; i < nu; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < nu; i = next++) work(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<FidelityEvaluation> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = unique_results[dd.representative[i]];
  return out;
}

namespace {

WorstCase summarize(const std::vector<FidelityEvaluation>& evals) {
  if (evals.empty()) throw std::invalid_argument("worst_case_fidelity: no corners");
  WorstCase wc;
  wc.fidelities.reserve(evals.size());
  for (const auto& e : evals) wc.fidelities.push_back(e.fidelity);
  const auto it = std::min_element(wc.fidelities.begin(), wc.fidelities.end());
  wc.min_fidelity = *it;
  wc.argmin = static_cast<int>(it - wc.fidelities.begin());
  wc.mean_fidelity = std::accumulate(wc.fidelities.begin(), wc.fidelities.end(), 0.0) /
                     static_cast<double>(wc.fidelities.size());
  return wc;
}

}  // namespace

WorstCase worst_case_fidelity(const Block& block, const ControlVector& controls,
                              const std::vector<ParameterPoint>& corners, const TargetGate& target, int threads) {
  return summarize(evaluate_points(block, controls, corners, target, false, threads));
}

std::vector<std::uint32_t> resolution_iv_corners(int num_parameters) {
  if (num_parameters < 0 || num_parameters > kMaxUncertainParameters) {
    throw std::invalid_argument("resolution_iv_corners: bad parameter count");
  }
  int base = 1;
  while ((1 << (base - 1)) < num_parameters) ++base;
  std::vector<std::uint32_t> all;
  if (base >= num_parameters) {
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << num_parameters); ++k) all.push_back(k);
    return all;
  }
  // Column generators: odd-weight subsets of the base factors, lightest first.
  std::vector<std::uint32_t> generators;
  for (int w = 1; static_cast<int>(generators.size()) < num_parameters; w += 2) {
    for (std::uint32_t s = 1; s < (1u << base) && static_cast<int>(generators.size()) < num_parameters; ++s) {
      if (std::popcount(s) == w) generators.push_back(s);
    }
  }
  std::vector<std::uint32_t> runs;
  for (std::uint32_t r = 0; r < (1u << base); ++r) {
    std::uint32_t corner = 0;
    for (int i = 0; i < num_parameters; ++i) corner |= static_cast<std::uint32_t>(std::popcount(r & generators[i]) & 1) << i;
    runs.push_back(corner);
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

std::string to_string(CornerSet c) { return c == CornerSet::all ? "all" : "resolution_iv"; }

CornerSet corner_set_from_string(const std::string& s) {
  if (s == "all") return CornerSet::all;
  if (s == "resolution_iv" || s == "resolution-iv") return CornerSet::resolution_iv;
  throw std::invalid_argument("unknown corner set '" + s + "'");
}

std::string to_string(Algorithm a) { return a == Algorithm::scp_minimax ? "scp_minimax" : "avg_quasi_newton"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "scp_minimax" || s == "scp") return Algorithm::scp_minimax;
  if (s == "avg_quasi_newton" || s == "avg") return Algorithm::avg_quasi_newton;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

void OptimizationConfig::validate() const {
  if (bins <= 0) throw std::invalid_argument("bins must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be positive");
  if (!(growth > 1.0) || !(shrink > 1.0)) throw std::invalid_argument("trust region needs growth > 1 > 1/shrink");
  if (!(trust_region_init > 0.0)) throw std::invalid_argument("trust_region_init must be positive");
  if (!(step_tolerance > 0.0)) throw std::invalid_argument("step_tolerance must be positive");
  if (max_iterations < 0 || max_evaluations < 1) throw std::invalid_argument("iteration limits must be non-negative");
  if (num_restarts < 1) throw std::invalid_argument("num_restarts must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(init_amplitude >= 0.0) || init_amplitude > omega_max) {
    throw std::invalid_argument("init_amplitude must lie in [0, omega_max]");
  }
  if (initial_controls) {
    if (initial_controls->bins() != bins || initial_controls->duration() != duration) {
      throw std::invalid_argument("initial controls do not match bins/duration");
    }
    if (initial_controls->max_abs() > omega_max + 1e-12) {
      throw std::invalid_argument("initial controls exceed omega_max");
    }
  }
}

ControlVector random_controls(const Block& block, const OptimizationConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-config.init_amplitude, config.init_amplitude);
  ControlVector c(config.duration, config.bins, block.num_center());
  for (auto& v : c.values()) v = dist(rng);
  return c;
}

namespace {

struct RunOutcome {
  ControlVector controls;
  WorstCase worst;
  int iterations = 0;
  int evaluations = 0;
  std::vector<TracePoint> trace;
  std::string reason;
};

struct Problem {
  const Block& block;
  const TargetGate& target;
  const std::vector<ParameterPoint>& corners;
  const OptimizationConfig& config;
};

bool target_reached(const Problem& p, double fmin) {
  return p.config.target_infidelity > 0.0 && 1.0 - fmin <= p.config.target_infidelity;
}

void notify(const Problem& p, int restart, int iteration, const WorstCase& wc, double trust,
            const ControlVector& best) {
  if (!p.config.on_iteration) return;
  IterationInfo info;
  info.restart = restart;
  info.iteration = iteration;
  info.min_fidelity = wc.min_fidelity;
  info.mean_fidelity = wc.mean_fidelity;
  info.trust_region = trust;
  info.best_controls = &best;
  p.config.on_iteration(info);
}

// LP for one SCP step. Variables: scaled steps yhat in [0, 1] with
// delta = lo + w * yhat, then t >= 0, then one surplus per distinct corner.
// Row i: F_i - F_min + g_i . delta >= t.
std::optional<std::vector<double>> scp_step(const std::vector<FidelityEvaluation>& evals, const Deduplicated& dd,
                                            double fmin, const std::vector<double>& c, double u, double omega_max) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(dd.unique.size());
  std::vector<double> lo(n), w(n);
  for (int k = 0; k < n; ++k) {
    lo[k] = std::max(-u, -omega_max - c[k]);
    const double hi = std::min(u, omega_max - c[k]);
    w[k] = std::max(hi - lo[k], 0.0);
  }
  Eigen::MatrixXd rows(m, n);
  Eigen::VectorXd offset(m);
  double scale = 0.0;
  for (int i = 0; i < m; ++i) {
    const FidelityEvaluation& e = evals[dd.unique[i]];
    double gain = 0.0, base = e.fidelity - fmin;
    for (int k = 0; k < n; ++k) {
      rows(i, k) = e.gradient[k] * w[k];
      gain += std::abs(rows(i, k));
      base += e.gradient[k] * lo[k];
    }
    offset(i) = base;
    scale = std::max(scale, gain + std::abs(e.fidelity - fmin));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;

  LinearProgram lp;
  lp.a = Eigen::MatrixXd::Zero(m, n + 1 + m);
  lp.a.leftCols(n) = rows / scale;
  lp.a.col(n).setConstant(-1.0);
  lp.a.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
  lp.b = -offset / scale;
  lp.c = Eigen::VectorXd::Zero(n + 1 + m);
  lp.c(n) = -1.0;
  lp.upper = Eigen::VectorXd::Constant(n + 1 + m, kLpInfinity);
  lp.upper.head(n).setOnes();
  LpOptions opt;
  opt.max_iterations = 200;
  const LpSolution sol = solve_lp(lp, opt);
  if (sol.status == LpStatus::numerical_failure || !sol.x.allFinite()) return std::nullopt;
  if (!(sol.x(n) > 1e-9)) return std::nullopt;

  std::vector<double> next(n);
  for (int k = 0; k < n; ++k) {
    const double delta = lo[k] + w[k] * std::clamp(sol.x(k), 0.0, 1.0);
    next[k] = std::clamp(c[k] + delta, -omega_max, omega_max);
  }
  return next;
}

RunOutcome run_scp(const Problem& p, ControlVector start, int restart) {
  const Deduplicated dd = deduplicate(p.corners);
  const OptimizationConfig& cfg = p.config;
  RunOutcome out;
  out.controls = std::move(start);
  auto evals = evaluate_points(p.block, out.controls, p.corners, p.target, true, cfg.threads);
  out.evaluations = 1;
  out.worst = summarize(evals);
  out.trace.push_back({0, out.worst.min_fidelity, out.worst.mean_fidelity});
  double u = cfg.trust_region_init;
  out.reason = "iteration limit";
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    if (target_reached(p, out.worst.min_fidelity)) {
      out.reason = "target reached";
      break;
    }
    if (u < cfg.step_tolerance) {
      out.reason = "trust region below tolerance";
      break;
    }
    out.iterations = iter;
    const auto next = scp_step(evals, dd, out.worst.min_fidelity, out.controls.values(), u, cfg.omega_max);
    bool accepted = false;
    if (next) {
      ControlVector trial(out.controls.duration(), out.controls.bins(), out.controls.channels(), *next);
      auto trial_evals = evaluate_points(p.block, trial, p.corners, p.target, true, cfg.threads);
      ++out.evaluations;
      WorstCase trial_wc = summarize(trial_evals);
      if (trial_wc.min_fidelity > out.worst.min_fidelity) {
        out.controls = std::move(trial);
        evals = std::move(trial_evals);
        out.worst = std::move(trial_wc);
        accepted = true;
      }
    }
    u = accepted ? std::min(u * cfg.growth, 2.0 * cfg.omega_max) : u / cfg.shrink;
    if (accepted) out.trace.push_back({iter, out.worst.min_fidelity, out.worst.mean_fidelity});
    notify(p, restart, iter, out.worst, u, out.controls);
  }
  if (out.iterations == cfg.max_iterations && target_reached(p, out.worst.min_fidelity)) out.reason = "target reached";
  return out;
}

// Projected L-BFGS minimizing 1 - mean corner fidelity.
RunOutcome run_avg(const Problem& p, ControlVector start, int restart) {
  const OptimizationConfig& cfg = p.config;
  const int n = static_cast<int>(start.size());
  const double bound = cfg.omega_max;
  RunOutcome out;
  out.controls = std::move(start);

  using Eigen::VectorXd;
  auto objective = [&](const ControlVector& c, WorstCase& wc, VectorXd& grad) {
    const auto evals = evaluate_points(p.block, c, p.corners, p.target, true, cfg.threads);
    ++out.evaluations;
    wc = summarize(evals);
    grad = VectorXd::Zero(n);
    for (const auto& e : evals) grad -= Eigen::Map<const VectorXd>(e.gradient.data(), n);
    grad /= static_cast<double>(evals.size());
    return 1.0 - wc.mean_fidelity;
  };
  auto project = [&](VectorXd v) { return VectorXd(v.cwiseMax(-bound).cwiseMin(bound)); };

  VectorXd x = Eigen::Map<const VectorXd>(out.controls.values().data(), n);
  VectorXd g;
  double f = objective(out.controls, out.worst, g);
  out.trace.push_back({0, out.worst.min_fidelity, out.worst.mean_fidelity});

  constexpr int kMemory = 12;
  std::deque<std::pair<VectorXd, VectorXd>> memory;
  out.reason = "evaluation limit";
  int iter = 0;
  while (out.evaluations < cfg.max_evaluations) {
    if (target_reached(p, out.worst.min_fidelity)) {
      out.reason = "target reached";
      break;
    }
    // Variables held at a bound by the gradient stay fixed this iteration.
    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);
    for (int k = 0; k < n; ++k) {
      free(k) = !((x(k) <= -bound && g(k) > 0.0) || (x(k) >= bound && g(k) < 0.0));
    }
    const VectorXd gf = free.select(g, VectorXd::Zero(n));
    if (gf.lpNorm<Eigen::Infinity>() < 1e-15) {
      out.reason = "stationary";
      break;
    }
    VectorXd d = -gf;
    if (!memory.empty()) {
      std::vector<double> alpha(memory.size());
      VectorXd q = gf;
      for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = memory[i];
        alpha[i] = s.dot(q) / y.dot(s);
        q -= alpha[i] * y;
      }
      const auto& [s_last, y_last] = memory.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const auto& [s, y] = memory[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[i] - beta) * s;
      }
      d = free.select(-q, VectorXd::Zero(n));
      if (!(d.dot(gf) < 0.0)) {
        memory.clear();
        d = -gf;
      }
    }
    double step = memory.empty() ? std::min(1.0, cfg.trust_region_init / d.lpNorm<Eigen::Infinity>()) : 1.0;

    bool moved = false;
    WorstCase wc_new;
    VectorXd g_new, x_new;
    double f_new = f;
    for (int ls = 0; ls < 40 && out.evaluations < cfg.max_evaluations; ++ls) {
      x_new = project(x + step * d);
      if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) break;
      ControlVector trial(out.controls.duration(), out.controls.bins(), out.controls.channels(),
                          std::vector<double>(x_new.data(), x_new.data() + n));
      f_new = objective(trial, wc_new, g_new);
      if (f_new <= f + 1e-4 * g.dot(x_new - x) && f_new <= f) {
        moved = true;
        out.controls = std::move(trial);
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      out.reason = "line search stalled";
      break;
    }
    ++iter;
    const VectorXd s = x_new - x, y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (static_cast<int>(memory.size()) > kMemory) memory.pop_front();
    }
    x = x_new;
    g = g_new;
    f = f_new;
    out.worst = std::move(wc_new);
    out.iterations = iter;
    out.trace.push_back({iter, out.worst.min_fidelity, out.worst.mean_fidelity});
    notify(p, restart, iter, out.worst, 0.0, out.controls);
  }
  return out;
}

OptimizationResult run_restarts(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                                const OptimizationConfig& config,
                                RunOutcome (*run)(const Problem&, ControlVector, int)) {
  config.validate();
  if (target.num_qubits() != block.num_center()) {
    throw std::invalid_argument("target acts on " + std::to_string(target.num_qubits()) + " qubits, block center has " +
                                std::to_string(block.num_center()));
  }
  const std::vector<ParameterPoint> corners = hypercube_corners(block, spec);
  std::vector<ParameterPoint> working;
  if (config.corner_set == CornerSet::resolution_iv) {
    for (std::uint32_t k : resolution_iv_corners(uncertain_parameter_count(block))) working.push_back(corners[k]);
  }
  const Problem problem{block, target, working.empty() ? corners : working, config};

  OptimizationResult best;
  best.min_fidelity = -1.0;
  int total_evaluations = 0;
  for (int r = 0; r < config.num_restarts; ++r) {
    ControlVector start = (r == 0 && config.initial_controls)
                              ? *config.initial_controls
                              : random_controls(block, config, config.seed + 0x9E3779B97F4A7C15ull * r);
    if (start.channels() != block.num_center()) throw std::invalid_argument("initial controls: channel count mismatch");
    RunOutcome run_out = run(problem, std::move(start), r);
    total_evaluations += run_out.evaluations;
    if (run_out.worst.min_fidelity > best.min_fidelity) {
      best.controls = std::move(run_out.controls);
      best.corner_fidelities = std::move(run_out.worst.fidelities);
      best.min_fidelity = run_out.worst.min_fidelity;
      best.argmin_corner = run_out.worst.argmin;
      best.mean_fidelity = run_out.worst.mean_fidelity;
      best.iterations = run_out.iterations;
      best.best_restart = r;
      best.trace = std::move(run_out.trace);
      best.terminated_reason = run_out.reason;
    }
    if (target_reached(problem, best.min_fidelity)) break;
  }
  best.evaluations = total_evaluations;
  if (!working.empty()) {
    WorstCase full = worst_case_fidelity(block, best.controls, corners, target, config.threads);
    best.corner_fidelities = std::move(full.fidelities);
    best.min_fidelity = full.min_fidelity;
    best.argmin_corner = full.argmin;
    best.mean_fidelity = full.mean_fidelity;
  }
  return best;
}

}  // namespace

OptimizationResult optimize_scp(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                                const OptimizationConfig& config) {
  return run_restarts(block, target, spec, config, run_scp);
}

OptimizationResult optimize_avg(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                                const OptimizationConfig& config) {
  return run_restarts(block, target, spec, config, run_avg);
}

OptimizationResult optimize(const Block& block, const TargetGate& target, const UncertaintySpec& spec,
                            const OptimizationConfig& config) {
  return config.algorithm == Algorithm::scp_minimax ? optimize_scp(block, target, spec, config)
                                                    : optimize_avg(block, target, spec, config);
}

double coherence_bound(double duration, double t2, int block_size) {
  if (!(t2 > 0.0)) throw std::invalid_argument("coherence_bound: T2 must be positive");
  return std::max(0.0, 1.0 - block_size * duration / t2);
}

}  // namespace zzp
