#include "flowgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "flowgame/errors.hpp"
#include "flowgame/projection.hpp"

namespace flowgame {

namespace {

constexpr double kIterateCap = 1e12;  // anything past this is runaway

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; keeps sampling independent of any
// library distribution internals so seeded runs are reproducible everywhere.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RunOutcome {
  Eigen::VectorXd u;
  double residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
  bool converged = false;
  bool diverged = false;
};

using Observer =
    std::function<void(long, const Eigen::VectorXd&, double residual)>;

RunOutcome run_dynamics(const Network& net, const CostModel& cm,
                        OperatorKind kind, double h, long max_iters,
                        double tol, const Eigen::VectorXd& init,
                        const Observer& observer) {
  // Stall window: a run that converges within max_iters improves its best
  // residual far faster than 1% per 20k iterations, while an unstable step
  // size plateaus; bailing early just hands control to the halving schedule.
  constexpr long kStallWindow = 20000;
  double best_residual = std::numeric_limits<double>::infinity();
  double window_best = best_residual;
  long window_start = 0;

  RunOutcome out;
  Eigen::VectorXd u = init;
  Eigen::VectorXd y = init;
  for (long t = 0;; ++t) {
    const Eigen::VectorXd T =
        operator_map(net, cm, kind, FlowProfile{u});
    if (!T.allFinite()) {
      out.diverged = true;
      break;
    }
    const Eigen::VectorXd natural = project_profile(net, u - T).values;
    const double residual = (u - natural).norm();
    if (observer) {
      observer(t, u, residual);
    }
    out.u = u;
    out.residual = residual;
    out.iterations = t;
    if (residual <= tol) {
      out.converged = true;
      break;
    }
    if (t >= max_iters) {
      break;
    }
    best_residual = std::min(best_residual, residual);
    if (t - window_start >= kStallWindow) {
      if (best_residual > 0.99 * window_best) {
        break;
      }
      window_best = best_residual;
      window_start = t;
    }
    y += h * (u - T - y);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kIterateCap) {
      out.diverged = true;
      break;
    }
    u = project_profile(net, y).values;
  }
  return out;
}

}  // namespace

Eigen::VectorXd operator_map(const Network& net, const CostModel& cm,
                             OperatorKind kind, const FlowProfile& u) {
  switch (kind) {
    case OperatorKind::team:
      return team_gradient(net, cm, u);
    case OperatorKind::game:
      return pseudo_gradient(net, cm, u);
    case OperatorKind::potential:
      return potential_pseudo_gradient(net, cm, u);
  }
  throw InputError("operator_map: unknown operator kind");
}

void validate_solver_config(const SolverConfig& cfg) {
  if (!(cfg.step_size > 0.0) || cfg.step_size > 1.0) {
    throw InputError("solver config: step_size must lie in (0, 1]");
  }
  if (cfg.max_iters < 1) {
    throw InputError("solver config: max_iters must be positive");
  }
  if (!(cfg.residual_tol > 0.0)) {
    throw InputError("solver config: residual_tol must be positive");
  }
  if (cfg.num_starts < 1) {
    throw InputError("solver config: num_starts must be positive");
  }
  if (!(cfg.dedup_tol > 0.0)) {
    throw InputError("solver config: dedup_tol must be positive");
  }
  if (cfg.max_step_halvings < 0) {
    throw InputError("solver config: max_step_halvings must be nonnegative");
  }
}

SolveResult solve_dynamics(const Network& net, const CostModel& cm,
                           OperatorKind kind, const SolverConfig& cfg,
                           const FlowProfile& init) {
  validate_solver_config(cfg);
  validate_cost_model(net, cm);
  if (!validate_profile(net, init, 1e-9)) {
    throw InputError("solve_dynamics: initial profile is not feasible");
  }

  SolveResult best;
  bool have_best = false;
  for (int attempt = 0; attempt <= cfg.max_step_halvings; ++attempt) {
    const double h = cfg.step_size / static_cast<double>(1L << attempt);

    std::vector<TrajectoryPoint> trajectory;
    Observer observer;
    if (cfg.log_trajectory) {
      observer = [&](long iter, const Eigen::VectorXd& u, double residual) {
        trajectory.push_back(
            {iter, team_cost(net, cm, FlowProfile{u}), residual});
      };
    }

    RunOutcome out = run_dynamics(net, cm, kind, h, cfg.max_iters,
                                  cfg.residual_tol, init.values, observer);

    SolveResult result;
    result.profile.values = out.u;
    result.residual = out.residual;
    result.iterations = out.iterations;
    result.converged = out.converged;
    result.step_used = h;
    result.trajectory = std::move(trajectory);

    if (result.converged) {
      return result;
    }
    if (!have_best || result.residual < best.residual) {
      best = std::move(result);
      have_best = true;
    }
  }
  return best;  // converged == false; caller decides how loudly to fail
}

double vi_residual(const Network& net, const CostModel& cm, OperatorKind kind,
                   const FlowProfile& u) {
  const Eigen::VectorXd T = operator_map(net, cm, kind, u);
  const Eigen::VectorXd natural = project_profile(net, u.values - T).values;
  return (u.values - natural).norm();
}

FlowProfile random_feasible_profile(const Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FlowProfile u;
  u.values.resize(net.total_paths());
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    Eigen::VectorXd g(p);
    double total = 0.0;
    for (int k = 0; k < p; ++k) {
      g[k] = -std::log(1.0 - uniform01(rng));
      total += g[k];
    }
    if (total <= 0.0) {
      g.setConstant(1.0);
      total = static_cast<double>(p);
    }
    u.values.segment(off, p) = g * (net.demand(i) / total);
  }
  return u;
}

SolutionSet multi_start(const Network& net, const CostModel& cm,
                        OperatorKind kind, const SolverConfig& cfg) {
  validate_solver_config(cfg);

  std::vector<Eigen::VectorXd> endpoints;
  for (int s = 0; s < cfg.num_starts; ++s) {
    const std::uint64_t start_seed =
        splitmix64(cfg.seed + 0x9E3779B97F4A7C15ULL * (s + 1));
    const FlowProfile init = random_feasible_profile(net, start_seed);
    SolveResult result = solve_dynamics(net, cm, kind, cfg, init);
    if (result.converged) {
      endpoints.push_back(std::move(result.profile.values));
    }
  }
  if (endpoints.empty()) {
    throw SolverError("multi_start: no run converged");
  }

  // Order-independent aggregation: canonical sort, then greedy dedup.
  std::sort(endpoints.begin(), endpoints.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                  b.data(),
                                                  b.data() + b.size());
            });

  SolutionSet set;
  set.dedup_tol = cfg.dedup_tol;
  for (const Eigen::VectorXd& candidate : endpoints) {
    bool distinct = true;
    for (const FlowProfile& kept : set.points) {
      if ((candidate - kept.values).norm() < cfg.dedup_tol) {
        distinct = false;
        break;
      }
    }
    if (distinct) {
      set.points.push_back(FlowProfile{candidate});
    }
  }
  return set;
}

DecayReport lyapunov_decay_check(const Network& net, const CostModel& cm,
                                 OperatorKind kind, const SolverConfig& cfg,
                                 const FlowProfile& init) {
  SolveResult reference = solve_dynamics(net, cm, kind, cfg, init);
  if (!reference.converged) {
    throw SolverError(
        "lyapunov_decay_check: reference solve did not converge");
  }
  const Eigen::VectorXd& target = reference.profile.values;

  std::vector<double> v;
  Observer observer = [&](long, const Eigen::VectorXd& u, double) {
    v.push_back(0.5 * (u - target).squaredNorm());
  };
  run_dynamics(net, cm, kind, reference.step_used, cfg.max_iters,
               cfg.residual_tol, init.values, observer);

  DecayReport report;
  report.step_used = reference.step_used;
  report.iterations = static_cast<long>(v.size()) - 1;
  report.v_initial = v.front();
  report.v_final = v.back();
  for (std::size_t t = 0; t + 1 < v.size(); ++t) {
    if (v[t + 1] > v[t] * (1.0 + 1e-9) + 1e-24) {
      ++report.num_increases;
    }
  }
  if (report.iterations > 0) {
    report.increase_fraction =
        static_cast<double>(report.num_increases) / report.iterations;
  }

  // Geometric rate from a least-squares fit of log V over the iterations
  // above the numerical floor.
  const double floor = std::max(report.v_initial * 1e-12, 1e-300);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t] > floor) {
      const double x = static_cast<double>(t);
      const double y = std::log(v[t]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  report.fit_points = n;
  if (n >= 2 && sxx * n - sx * sx > 0.0) {
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.decay_factor = std::exp(slope);
  } else {
    report.decay_factor = 0.0;  // V at the floor from the start
  }
  return report;
}

}  // namespace flowgame
