#include <doctest.h>

#include <random>

#include "flowgame/errors.hpp"
#include "flowgame/projection.hpp"
#include "flowgame/solver.hpp"
#include "test_support.hpp"

using namespace flowgame;
namespace ts = testsupport;

TEST_CASE("projected dynamics find the weighted-split optimum") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);
  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team,
                                       sc.solver, uniform_profile(net));
  REQUIRE(r.converged);
  CHECK(r.residual <= sc.solver.residual_tol);
  // Stationarity 2 u1 = 6 (2 - u1) gives (1.5, 0.5).
  CHECK(r.profile.values[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.profile.values[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(vi_residual(net, sc.cost, OperatorKind::team, r.profile) <=
        sc.solver.residual_tol);
}

TEST_CASE("symmetric toy lands on the even split for every operator") {
  const Scenario sc = ts::load("toy_sym");
  const Network net = build_network(sc.network);
  for (OperatorKind kind :
       {OperatorKind::team, OperatorKind::game, OperatorKind::potential}) {
    const SolveResult r =
        solve_dynamics(net, sc.cost, kind, sc.solver, uniform_profile(net));
    REQUIRE(r.converged);
    CHECK(r.profile.values[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.profile.values[1] == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("vi residual values") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);

  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team,
                                       sc.solver, uniform_profile(net));
  CHECK(vi_residual(net, sc.cost, OperatorKind::team, r.profile) < 1e-8);

  FlowProfile even;
  even.values.resize(2);
  even.values << 1.0, 1.0;
  CHECK(vi_residual(net, sc.cost, OperatorKind::team, even) > 0.1);
}

TEST_CASE("solver output is always a feasible profile") {
  const Scenario sc = ts::load("fig2_case1");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.max_iters = 7;  // unconverged on purpose
  cfg.max_step_halvings = 0;
  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                       uniform_profile(net));
  CHECK_FALSE(r.converged);
  CHECK(validate_profile(net, r.profile, 1e-9));
}

TEST_CASE("trajectory log carries iteration, cost and residual") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.log_trajectory = true;
  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                       uniform_profile(net));
  REQUIRE(r.converged);
  REQUIRE(!r.trajectory.empty());
  CHECK(r.trajectory.front().iter == 0);
  CHECK(r.trajectory.back().residual <= cfg.residual_tol);
  for (const TrajectoryPoint& p : r.trajectory) {
    CHECK(std::isfinite(p.cost));
    CHECK(std::isfinite(p.residual));
  }
}

TEST_CASE("infeasible initial profile is rejected") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);
  FlowProfile bad;
  bad.values.resize(2);
  bad.values << 2.0, 2.0;
  CHECK_THROWS_AS(
      solve_dynamics(net, sc.cost, OperatorKind::team, sc.solver, bad),
      InputError);
}

TEST_CASE("invalid solver configs are rejected") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                 uniform_profile(net)),
                  InputError);
  cfg = sc.solver;
  cfg.step_size = 1.5;
  CHECK_THROWS_AS(solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                 uniform_profile(net)),
                  InputError);
  cfg = sc.solver;
  cfg.residual_tol = 0.0;
  CHECK_THROWS_AS(solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                 uniform_profile(net)),
                  InputError);
}

TEST_CASE("runaway dynamics are reported as divergence, not returned") {
  // Astronomically large weights blow the iterates past the overflow guard
  // at every step size in the halving schedule.
  const Network net = build_network(ts::parallel_spec(2.0));
  CostModel cm = ts::uniform_cost(2, 1e200, 0.0, 1.0);
  SolverConfig cfg;
  const SolveResult r =
      solve_dynamics(net, cm, OperatorKind::team, cfg, uniform_profile(net));
  CHECK_FALSE(r.converged);
}

TEST_CASE("non-convergence is reported, never silently returned") {
  const Scenario sc = ts::load("fig2_case1");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.max_iters = 3;
  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team, cfg,
                                       uniform_profile(net));
  CHECK_FALSE(r.converged);
  CHECK(r.residual > cfg.residual_tol);
}

TEST_CASE("multi-start on a strongly monotone instance dedups to one point") {
  const Scenario sc = ts::load("toy_rho13");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.num_starts = 6;
  const SolutionSet set = multi_start(net, sc.cost, OperatorKind::team, cfg);
  CHECK(set.points.size() == 1);
  CHECK(vi_residual(net, sc.cost, OperatorKind::team, set.points[0]) <=
        cfg.residual_tol);
}

TEST_CASE("multi-start keeps distinct optima of a redundant-path instance") {
  const Scenario sc = ts::load("toy_redundant");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.num_starts = 8;
  const SolutionSet set = multi_start(net, sc.cost, OperatorKind::team, cfg);
  CHECK(set.points.size() >= 2);
  double cost_min = 1e300, cost_max = -1e300;
  for (const FlowProfile& u : set.points) {
    CHECK(vi_residual(net, sc.cost, OperatorKind::team, u) <=
          cfg.residual_tol);
    const double c = team_cost(net, sc.cost, u);
    cost_min = std::min(cost_min, c);
    cost_max = std::max(cost_max, c);
  }
  CHECK(cost_max - cost_min < 1e-8);
  // Pairwise separation respects the dedup tolerance.
  for (std::size_t a = 0; a < set.points.size(); ++a) {
    for (std::size_t b = a + 1; b < set.points.size(); ++b) {
      CHECK((set.points[a].values - set.points[b].values).norm() >=
            cfg.dedup_tol);
    }
  }
}

TEST_CASE("multi-start with a single start returns a singleton") {
  const Scenario sc = ts::load("toy_two_dm");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.num_starts = 1;
  const SolutionSet set = multi_start(net, sc.cost, OperatorKind::game, cfg);
  CHECK(set.points.size() == 1);
}

TEST_CASE("multi-start is deterministic in the seed") {
  const Scenario sc = ts::load("fig5");
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.num_starts = 4;
  const SolutionSet a = multi_start(net, sc.cost, OperatorKind::team, cfg);
  const SolutionSet b = multi_start(net, sc.cost, OperatorKind::team, cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK((a.points[i].values - b.points[i].values).lpNorm<Eigen::Infinity>() ==
          0.0);
  }
}

TEST_CASE("team and potential dynamics agree") {
  const Scenario sc = ts::load("fig5");
  const Network net = build_network(sc.network);
  const SolveResult team = solve_dynamics(net, sc.cost, OperatorKind::team,
                                          sc.solver, uniform_profile(net));
  const SolveResult pot = solve_dynamics(net, sc.cost, OperatorKind::potential,
                                         sc.solver, uniform_profile(net));
  REQUIRE(team.converged);
  REQUIRE(pot.converged);
  CHECK(team_cost(net, sc.cost, team.profile) ==
        doctest::Approx(team_cost(net, sc.cost, pot.profile)).epsilon(1e-6));
  CHECK(vi_residual(net, sc.cost, OperatorKind::potential, team.profile) <
        1e-6);
  CHECK(vi_residual(net, sc.cost, OperatorKind::team, pot.profile) < 1e-6);
}

TEST_CASE("team optimum is person-by-person optimal") {
  const Scenario sc = ts::load("fig2_case1");
  const Network net = build_network(sc.network);
  const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team,
                                       sc.solver, uniform_profile(net));
  REQUIRE(r.converged);
  // The natural map decomposes block-wise, so each DM's own residual under
  // the common cost must vanish separately.
  const Eigen::VectorXd g = team_gradient(net, sc.cost, r.profile);
  const FlowProfile natural = project_profile(net, r.profile.values - g);
  for (int i = 0; i < net.num_dms(); ++i) {
    const int off = net.block_offset(i);
    const int p = net.num_paths(i);
    CHECK((r.profile.values.segment(off, p) - natural.values.segment(off, p))
              .norm() <= sc.solver.residual_tol);
  }
}

TEST_CASE("solver team cost matches exhaustive grid search") {
  for (const char* name : {"toy_rho13", "toy_two_dm"}) {
    const Scenario sc = ts::load(name);
    const Network net = build_network(sc.network);
    const SolveResult r = solve_dynamics(net, sc.cost, OperatorKind::team,
                                         sc.solver, uniform_profile(net));
    REQUIRE(r.converged);
    const double grid = ts::grid_search_min_cost(net, sc.cost, 200);
    double max_step = 0.0;
    for (int i = 0; i < net.num_dms(); ++i) {
      max_step = std::max(max_step, net.demand(i) / 200.0);
    }
    const double tol = 2.0 * max_step * ts::team_cost_lipschitz(net, sc.cost);
    CHECK(std::abs(team_cost(net, sc.cost, r.profile) - grid) <= tol);
  }
}

TEST_CASE("random feasible profiles are feasible and seed-stable") {
  const Network net = build_network(ts::load("fig5").network);
  const FlowProfile a = random_feasible_profile(net, 99);
  const FlowProfile b = random_feasible_profile(net, 99);
  const FlowProfile c = random_feasible_profile(net, 100);
  CHECK(validate_profile(net, a, 1e-9));
  CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.values - c.values).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("lyapunov decay along the certified trajectory") {
  SUBCASE("toy with a mild step decays monotonically") {
    const Scenario sc = ts::load("toy_rho13");
    const Network net = build_network(sc.network);
    SolverConfig cfg = sc.solver;
    cfg.step_size = 0.1;
    const DecayReport d = lyapunov_decay_check(net, sc.cost,
                                               OperatorKind::team, cfg,
                                               uniform_profile(net));
    CHECK(d.num_increases == 0);
    CHECK(d.decay_factor < 1.0);
    CHECK(d.v_final <= d.v_initial);
  }
  SUBCASE("starting at the solution keeps V at zero") {
    const Scenario sc = ts::load("toy_rho13");
    const Network net = build_network(sc.network);
    const SolveResult ref = solve_dynamics(net, sc.cost, OperatorKind::team,
                                           sc.solver, uniform_profile(net));
    REQUIRE(ref.converged);
    const DecayReport d = lyapunov_decay_check(net, sc.cost,
                                               OperatorKind::team, sc.solver,
                                               ref.profile);
    CHECK(d.v_initial <= 1e-15);
    CHECK(d.num_increases == 0);
  }
  SUBCASE("larger network decays with a factor below one") {
    const Scenario sc = ts::load("fig2_case1");
    const Network net = build_network(sc.network);
    const DecayReport d = lyapunov_decay_check(net, sc.cost,
                                               OperatorKind::team, sc.solver,
                                               uniform_profile(net));
    CHECK(d.step_used <= sc.solver.step_size);
    CHECK(d.num_increases == 0);
    CHECK(d.decay_factor < 1.0);
  }
}
