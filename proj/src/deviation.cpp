#include "flowgame/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "flowgame/errors.hpp"
#include "flowgame/projection.hpp"

namespace flowgame {

namespace {

constexpr int kVertexEnumLimit = 12;  // total paths above this: sampling only

// Orthonormal basis of the tangent space {d : sum_k d_i^k = 0 for all i},
// assembled block-wise from Helmert columns.
Eigen::MatrixXd tangent_basis(const Network& net) {
  const int n = net.total_paths();
  const int cols = n - net.num_dms();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, std::max(cols, 0));
  int col = 0;
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    for (int j = 1; j < p; ++j) {
      const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
      for (int k = 0; k < j; ++k) {
        basis(off + k, col) = 1.0 / norm;
      }
      basis(off + j, col) = -static_cast<double>(j) / norm;
      ++col;
    }
  }
  return basis;
}

// Calls fn with every vertex of the product of scaled simplices (each DM
// routes its whole demand over a single path).
void for_each_vertex(const Network& net,
                     const std::function<void(const Eigen::VectorXd&)>& fn) {
  const int num_dms = net.num_dms();
  std::vector<int> choice(num_dms, 0);
  Eigen::VectorXd vertex = Eigen::VectorXd::Zero(net.total_paths());
  while (true) {
    vertex.setZero();
    for (int i = 0; i < num_dms; ++i) {
      vertex[net.block_offset(i) + choice[i]] = net.demand(i);
    }
    fn(vertex);
    int i = 0;
    for (; i < num_dms; ++i) {
      if (++choice[i] < net.num_paths(i)) {
        break;
      }
      choice[i] = 0;
    }
    if (i == num_dms) {
      break;
    }
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double strong_monotonicity_constant(const Network& net, const CostModel& cm,
                                    OperatorKind kind) {
  validate_cost_model(net, cm);
  const Eigen::MatrixXd jac = (kind == OperatorKind::game)
                                  ? game_jacobian(net, cm)
                                  : team_hessian(net, cm);
  const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
  const Eigen::MatrixXd basis = tangent_basis(net);
  if (basis.cols() == 0) {
    // Single-point strategy set: strong monotonicity holds vacuously.
    return std::numeric_limits<double>::infinity();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      basis.transpose() * sym * basis);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

double max_vertex_distance(const Network& net, const FlowProfile& center) {
  if (center.values.size() != net.total_paths()) {
    throw InputError("max_vertex_distance: center has wrong dimension");
  }
  double sq = 0.0;
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    const auto block = center.values.segment(off, p);
    double best = 0.0;
    for (int k = 0; k < p; ++k) {
      Eigen::VectorXd vertex = Eigen::VectorXd::Zero(p);
      vertex[k] = net.demand(i);
      best = std::max(best, (vertex - block).squaredNorm());
    }
    sq += best;
  }
  return std::sqrt(sq);
}

PerturbationSup perturbation_sup(const Network& net, const CostModel& cm,
                                 const FlowProfile& center, double q,
                                 int num_samples, std::uint64_t seed) {
  if (!(q > 0.0)) {
    throw InputError("perturbation_sup: q must be positive");
  }
  if (center.values.size() != net.total_paths()) {
    throw InputError("perturbation_sup: center has wrong dimension");
  }

  PerturbationSup result;
  // The center itself always lies in Theta.
  result.value = perturbation(net, cm, center).norm();

  const bool enumerable = net.total_paths() <= kVertexEnumLimit;
  bool all_vertices_inside = true;
  if (enumerable) {
    for_each_vertex(net, [&](const Eigen::VectorXd& vertex) {
      if ((vertex - center.values).norm() < q) {
        ++result.vertices_inside;
        result.value = std::max(
            result.value, perturbation(net, cm, FlowProfile{vertex}).norm());
      } else {
        all_vertices_inside = false;
      }
    });
  }
  result.exact = enumerable && all_vertices_inside;

  for (int n = 0; n < num_samples; ++n) {
    const FlowProfile u = random_feasible_profile(
        net, splitmix64(seed + 0x9E3779B97F4A7C15ULL * (n + 1)));
    if ((u.values - center.values).norm() < q) {
      ++result.samples_inside;
      result.value = std::max(result.value, perturbation(net, cm, u).norm());
    }
  }
  return result;
}

DeviationReport deviation_bound_report(const Network& net,
                                       const CostModel& cm,
                                       const SolverConfig& cfg, double s,
                                       double q, int num_samples) {
  if (!(s > 0.0 && s < 1.0)) {
    throw InputError("deviation_bound_report: s must lie in (0, 1)");
  }

  const FlowProfile start = uniform_profile(net);
  SolveResult team = solve_dynamics(net, cm, OperatorKind::team, cfg, start);
  if (!team.converged) {
    throw SolverError("deviation_bound_report: team solve did not converge");
  }
  SolveResult game = solve_dynamics(net, cm, OperatorKind::game, cfg, start);
  if (!game.converged) {
    throw SolverError("deviation_bound_report: NE solve did not converge");
  }

  DeviationReport report;
  report.s = s;
  report.kappa1 = strong_monotonicity_constant(net, cm, OperatorKind::team);
  report.kappa2 = strong_monotonicity_constant(net, cm, OperatorKind::game);

  const double radius = max_vertex_distance(net, team.profile);
  PerturbationSup sup;
  if (q > 0.0) {
    report.q = q;
    sup = perturbation_sup(net, cm, team.profile, q, num_samples, cfg.seed);
  } else {
    // Cover the strategy set so the vertex scan is the exact sup, then leave
    // room for the strict inequality delta < kappa1*s*q. The bound itself
    // does not depend on q.
    const double cover = radius * (1.0 + 1e-6) + 1e-9;
    sup = perturbation_sup(net, cm, team.profile, cover, num_samples,
                           cfg.seed);
    report.q = cover;
    if (report.kappa1 > 0.0 && std::isfinite(report.kappa1)) {
      report.q = std::max(cover, 1.5 * sup.value / (report.kappa1 * s));
    }
  }
  report.delta = sup.value;
  report.delta_exact = sup.exact;

  report.bound = (report.kappa1 > 0.0)
                     ? report.delta / (report.kappa1 * s)
                     : std::numeric_limits<double>::infinity();
  report.deviation = (team.profile.values - game.profile.values).norm();
  report.applicable = report.kappa1 > 0.0 && report.kappa2 > 0.0 &&
                      report.delta_exact &&
                      report.delta < report.kappa1 * s * report.q;
  // Raw comparison by definition; an infinite bound is vacuously satisfied,
  // and `applicable` carries the interpretive caveat.
  report.bound_satisfied = report.deviation <= report.bound + 1e-9;
  report.cost_team = team_cost(net, cm, team.profile);
  report.cost_ne = team_cost(net, cm, game.profile);
  report.team_solution = std::move(team.profile);
  report.ne_solution = std::move(game.profile);
  return report;
}

double hausdorff(const std::vector<Eigen::VectorXd>& a,
                 const std::vector<Eigen::VectorXd>& b) {
  if (a.empty() || b.empty()) {
    throw InputError("hausdorff: sets must be non-empty");
  }
  const Eigen::Index dim = a.front().size();
  for (const auto& x : a) {
    if (x.size() != dim) {
      throw InputError("hausdorff: mismatched dimensions");
    }
  }
  for (const auto& y : b) {
    if (y.size() != dim) {
      throw InputError("hausdorff: mismatched dimensions");
    }
  }
  auto directed = [](const std::vector<Eigen::VectorXd>& from,
                     const std::vector<Eigen::VectorXd>& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& y : to) {
        nearest = std::min(nearest, (x - y).norm());
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

HausdorffReport solution_set_report(const Network& net, const CostModel& cm,
                                    const SolverConfig& cfg, double eta) {
  SolutionSet team_set = multi_start(net, cm, OperatorKind::team, cfg);
  SolutionSet ne_set = multi_start(net, cm, OperatorKind::game, cfg);

  std::vector<Eigen::VectorXd> team_points, ne_points;
  std::vector<Eigen::VectorXd> team_images, ne_images;
  for (const FlowProfile& u : team_set.points) {
    team_points.push_back(u.values);
    team_images.push_back(pseudo_gradient(net, cm, u));
  }
  double ne_min_coord = std::numeric_limits<double>::infinity();
  double ne_gradient_max = 0.0;
  for (const FlowProfile& u : ne_set.points) {
    ne_points.push_back(u.values);
    ne_images.push_back(pseudo_gradient(net, cm, u));
    ne_min_coord = std::min(ne_min_coord, u.values.minCoeff());
    ne_gradient_max = std::max(ne_gradient_max, ne_images.back().norm());
  }

  HausdorffReport report;
  report.kappa2 = strong_monotonicity_constant(net, cm, OperatorKind::game);
  report.h_strategy = hausdorff(team_points, ne_points);
  report.h_gradient = hausdorff(team_images, ne_images);
  report.eta = (eta > 0.0) ? eta : report.h_gradient * (1.0 + 1e-6) + 1e-12;
  report.gradient_within_eta = report.h_gradient < report.eta;
  report.bound = (report.kappa2 > 0.0)
                     ? report.eta / report.kappa2
                     : std::numeric_limits<double>::infinity();
  report.bound_satisfied =
      !report.gradient_within_eta || report.h_strategy < report.bound;
  report.team_points = static_cast<int>(team_points.size());
  report.ne_points = static_cast<int>(ne_points.size());
  report.ne_interior = ne_min_coord >= 1e-6;
  report.ne_gradient_max = ne_gradient_max;
  report.team_set = std::move(team_set.points);
  report.ne_set = std::move(ne_set.points);
  return report;
}

CoincidenceReport coincidence_certificate(const Network& net,
                                          const CostModel& cm,
                                          const SolverConfig& cfg,
                                          OperatorKind ne_family, double tol) {
  if (ne_family == OperatorKind::team) {
    throw InputError("coincidence_certificate: ne_family must be a game");
  }
  SolutionSet team_set = multi_start(net, cm, OperatorKind::team, cfg);
  SolutionSet ne_set = multi_start(net, cm, ne_family, cfg);

  CoincidenceReport report;
  report.ne_family = ne_family;
  report.tol = tol;
  report.team_points = static_cast<int>(team_set.points.size());
  report.ne_points = static_cast<int>(ne_set.points.size());

  double cost_min = std::numeric_limits<double>::infinity();
  double cost_max = -std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> team_points, ne_points;
  for (const FlowProfile& u : team_set.points) {
    report.max_team_cross_residual = std::max(
        report.max_team_cross_residual, vi_residual(net, cm, ne_family, u));
    const double c = team_cost(net, cm, u);
    cost_min = std::min(cost_min, c);
    cost_max = std::max(cost_max, c);
    team_points.push_back(u.values);
  }
  for (const FlowProfile& u : ne_set.points) {
    report.max_ne_cross_residual =
        std::max(report.max_ne_cross_residual,
                 vi_residual(net, cm, OperatorKind::team, u));
    const double c = team_cost(net, cm, u);
    cost_min = std::min(cost_min, c);
    cost_max = std::max(cost_max, c);
    ne_points.push_back(u.values);
  }
  report.cost_spread = cost_max - cost_min;
  report.hausdorff_distance = hausdorff(team_points, ne_points);
  report.passed = report.max_team_cross_residual <= tol &&
                  report.max_ne_cross_residual <= tol &&
                  report.cost_spread <= 1e-6;
  return report;
}

StrategyCostTable strategy_profile_cost_table(const Network& net,
                                              const CostModel& cm,
                                              OperatorKind ne_family,
                                              const SolverConfig& cfg,
                                              int deviator) {
  if (deviator < 0 || deviator >= net.num_dms()) {
    throw InputError("strategy_profile_cost_table: deviator out of range");
  }
  if (ne_family == OperatorKind::team) {
    throw InputError("strategy_profile_cost_table: ne_family must be a game");
  }
  const FlowProfile start = uniform_profile(net);
  SolveResult team = solve_dynamics(net, cm, OperatorKind::team, cfg, start);
  if (!team.converged) {
    throw SolverError("strategy_profile_cost_table: team solve diverged");
  }
  SolveResult ne = solve_dynamics(net, cm, ne_family, cfg, start);
  if (!ne.converged) {
    throw SolverError("strategy_profile_cost_table: NE solve diverged");
  }

  StrategyCostTable table;
  table.deviator = deviator;
  table.team_solution = team.profile;
  table.ne_solution = ne.profile;
  table.mixed_profile = team.profile;
  const int off = net.block_offset(deviator);
  const int p = net.num_paths(deviator);
  table.mixed_profile.values.segment(off, p) =
      ne.profile.values.segment(off, p);
  table.cost_team = team_cost(net, cm, table.team_solution);
  table.cost_mixed = team_cost(net, cm, table.mixed_profile);
  table.cost_ne = team_cost(net, cm, table.ne_solution);
  return table;
}

}  // namespace flowgame
