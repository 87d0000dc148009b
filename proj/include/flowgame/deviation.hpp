#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flowgame/cost.hpp"
#include "flowgame/network.hpp"
#include "flowgame/solver.hpp"

namespace flowgame {

// Smallest eigenvalue of the symmetrized operator Jacobian restricted to the
// tangent space of the block-sum equality constraints {sum_k du_i^k = 0}.
// A positive value certifies strong monotonicity over the strategy set; 0 is
// a valid, informative output (e.g. duplicated paths). Returns +infinity when
// the tangent space is trivial (every DM has a single path).
// `kind` potential is treated as team: the operators coincide.
double strong_monotonicity_constant(const Network& net, const CostModel& cm,
                                    OperatorKind kind);

// Exact max over vertices of ||v - center||; separable across blocks.
double max_vertex_distance(const Network& net, const FlowProfile& center);

struct PerturbationSup {
  double value = 0.0;  // max observed ||G(u) - F(u)|| over Theta
  bool exact = false;  // true iff vertex scan covered the whole strategy set
  long vertices_inside = 0;
  long samples_inside = 0;
};

// Estimates delta = sup ||theta(u)|| over Theta = {u feasible, ||u-center|| < q}.
// theta is affine, so ||theta|| is convex and the vertex scan is exact
// whenever the ball contains the strategy set; otherwise the returned value
// is a lower estimate (exact == false). Vertices are enumerated when
// sum_i P_i <= 12; seeded uniform samples are always added.
PerturbationSup perturbation_sup(const Network& net, const CostModel& cm,
                                 const FlowProfile& center, double q,
                                 int num_samples, std::uint64_t seed);

struct DeviationReport {
  std::string name;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double delta = 0.0;
  bool delta_exact = false;
  double s = 0.0;
  double q = 0.0;
  double bound = 0.0;      // delta / (kappa1 * s)
  double deviation = 0.0;  // ||u_team - u_ne||
  bool applicable = false; // kappa1>0, kappa2>0, delta exact and < kappa1*s*q
  bool bound_satisfied = false;  // deviation <= bound + 1e-9
  double cost_team = 0.0;
  double cost_ne = 0.0;
  FlowProfile team_solution;
  FlowProfile ne_solution;
};

// Solves both problems from the uniform start and assembles the deviation
// bound data. q <= 0 requests automatic sizing: the ball is grown to cover
// the strategy set and to leave room for the strict inequality
// delta < kappa1*s*q, so delta becomes the exact sup over the whole set.
// Throws SolverError if either solve fails to converge.
DeviationReport deviation_bound_report(const Network& net,
                                       const CostModel& cm,
                                       const SolverConfig& cfg, double s,
                                       double q, int num_samples);

// Hausdorff distance between finite point sets (max over both directions of
// the sup-inf Euclidean distance). Throws InputError on empty input or
// mismatched dimensions.
double hausdorff(const std::vector<Eigen::VectorXd>& a,
                 const std::vector<Eigen::VectorXd>& b);

struct HausdorffReport {
  std::string name;
  double kappa2 = 0.0;
  double eta = 0.0;
  double h_strategy = 0.0;  // H(team set, NE set), sampled estimate
  double h_gradient = 0.0;  // H(F(team set), F(NE set)), sampled estimate
  double bound = 0.0;       // eta / kappa2
  bool gradient_within_eta = false;
  bool bound_satisfied = false;  // h_strategy < bound whenever premise holds
  int team_points = 0;
  int ne_points = 0;
  bool ne_interior = false;     // every NE coordinate >= 1e-6
  double ne_gradient_max = 0.0; // max ||F(u_ne)|| over the NE set
  std::vector<FlowProfile> team_set;
  std::vector<FlowProfile> ne_set;
};

// Samples both solution sets via multi_start, maps them through F, and
// compares Hausdorff distances in strategy and gradient space. eta <= 0
// defaults to just above the measured gradient distance, which makes the
// comparison's premise hold and the conclusion checkable.
HausdorffReport solution_set_report(const Network& net, const CostModel& cm,
                                    const SolverConfig& cfg, double eta);

struct CoincidenceReport {
  std::string name;
  OperatorKind ne_family = OperatorKind::potential;
  int team_points = 0;
  int ne_points = 0;
  double max_team_cross_residual = 0.0;  // team optima under the NE-family VI
  double max_ne_cross_residual = 0.0;    // NE points under the team VI
  double cost_spread = 0.0;  // max - min team cost over the union
  double hausdorff_distance = 0.0;
  double tol = 0.0;
  bool passed = false;
};

// Certifies (or refutes) the coincidence of sampled team optima and sampled
// NE of the given payoff family: cross VI residuals <= tol both ways and a
// constant team cost across the union. With potential payoffs this passes;
// with the selfish payoffs it is expected to fail.
CoincidenceReport coincidence_certificate(const Network& net,
                                          const CostModel& cm,
                                          const SolverConfig& cfg,
                                          OperatorKind ne_family, double tol);

struct StrategyCostTable {
  int deviator = 0;  // 0-based DM index
  double cost_team = 0.0;
  double cost_mixed = 0.0;  // deviator plays its NE block, others team blocks
  double cost_ne = 0.0;
  FlowProfile team_solution;
  FlowProfile mixed_profile;
  FlowProfile ne_solution;
};

// Team cost under the three profiles: all-team, single deviator on its NE
// block, all-NE. Both solves start from the uniform profile; throws
// SolverError on non-convergence.
StrategyCostTable strategy_profile_cost_table(const Network& net,
                                              const CostModel& cm,
                                              OperatorKind ne_family,
                                              const SolverConfig& cfg,
                                              int deviator);

}  // namespace flowgame
