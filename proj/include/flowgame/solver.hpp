#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "flowgame/cost.hpp"
#include "flowgame/network.hpp"

namespace flowgame {

// Which operator drives the projected dynamics:
//   team      -> G  (team-cost gradient; fixed points are team optima)
//   game      -> F  (selfish pseudo-gradient; fixed points are NE)
//   potential -> F~ (potential-game pseudo-gradient)
enum class OperatorKind { team, game, potential };

Eigen::VectorXd operator_map(const Network& net, const CostModel& cm,
                             OperatorKind kind, const FlowProfile& u);

struct SolverConfig {
  double step_size = 0.05;  // forward-Euler step h, in (0, 1]
  long max_iters = 200000;
  double residual_tol = 1e-8;
  std::uint64_t seed = 1;
  int num_starts = 8;
  double dedup_tol = 1e-4;
  // On divergence or non-convergence, halve h and retry up to this many
  // times; the continuous-time theory says nothing about the discretization.
  int max_step_halvings = 4;
  bool log_trajectory = false;
};

void validate_solver_config(const SolverConfig& cfg);

struct TrajectoryPoint {
  long iter = 0;
  double cost = 0.0;      // team cost at the iterate
  double residual = 0.0;  // natural-map residual at the iterate
};

struct SolveResult {
  FlowProfile profile;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  double step_used = 0.0;
  std::vector<TrajectoryPoint> trajectory;  // filled iff cfg.log_trajectory
};

// Forward-Euler discretization of   ydot = -T(u) + u - y,  u = Pi(y),
// started at y0 = u0 = init. Convergence is certified by the natural-map
// residual ||u - Pi(u - T(u))|| <= residual_tol, never by iterate stall.
// Returns converged=false when no step size in the halving schedule
// certifies a solution within max_iters. Throws InputError on an infeasible
// init or invalid config.
SolveResult solve_dynamics(const Network& net, const CostModel& cm,
                           OperatorKind kind, const SolverConfig& cfg,
                           const FlowProfile& init);

// ||u - Pi(u - T(u))||: zero exactly at solutions of the variational
// inequality for T over the joint strategy set.
double vi_residual(const Network& net, const CostModel& cm, OperatorKind kind,
                   const FlowProfile& u);

// Uniform sample on the joint strategy set (per-block normalized exponential
// variates), deterministic in the generator state.
FlowProfile random_feasible_profile(const Network& net, std::uint64_t seed);

struct SolutionSet {
  std::vector<FlowProfile> points;  // pairwise distances >= dedup_tol
  double dedup_tol = 0.0;
};

// Runs solve_dynamics from num_starts seeded feasible starts, keeps converged
// runs, sorts endpoints canonically and deduplicates within cfg.dedup_tol.
// Throws SolverError if no start converges.
SolutionSet multi_start(const Network& net, const CostModel& cm,
                        OperatorKind kind, const SolverConfig& cfg);

struct DecayReport {
  double step_used = 0.0;
  long iterations = 0;
  double v_initial = 0.0;
  double v_final = 0.0;
  long num_increases = 0;        // iterations where V grew
  double increase_fraction = 0.0;
  double decay_factor = 1.0;     // exp(slope) of a log-linear fit of V
  long fit_points = 0;
};

// Verifies the Lyapunov function V(u_t) = 0.5||u_t - u*||^2 along the
// discrete trajectory from `init`, where u* is obtained by a converged solve
// with the same config. The re-run uses the step size that produced the
// reference, so the reported decay describes the certified trajectory.
DecayReport lyapunov_decay_check(const Network& net, const CostModel& cm,
                                 OperatorKind kind, const SolverConfig& cfg,
                                 const FlowProfile& init);

}  // namespace flowgame
