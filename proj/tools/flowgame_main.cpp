// flowgame: scenario-driven solver and analysis CLI.
//
// Exit codes: 0 success, 2 input error, 3 solver divergence,
// 4 claim-check failure in a reproduce suite.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowgame/cost.hpp"
#include "flowgame/deviation.hpp"
#include "flowgame/errors.hpp"
#include "flowgame/network.hpp"
#include "flowgame/scenario.hpp"
#include "flowgame/solver.hpp"

namespace {

using namespace flowgame;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitClaimFailed = 4;

struct Overrides {
  std::optional<double> s;
  std::optional<double> q;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<int> samples;
};

void apply_overrides(Scenario& sc, const Overrides& ov) {
  if (ov.s) sc.analysis.s = *ov.s;
  if (ov.q) sc.analysis.q = *ov.q;
  if (ov.eta) sc.analysis.eta = *ov.eta;
  if (ov.seed) sc.solver.seed = *ov.seed;
  if (ov.starts) sc.solver.num_starts = *ov.starts;
  if (ov.samples) sc.analysis.num_samples = *ov.samples;
}

OperatorKind mode_from_string(const std::string& mode) {
  if (mode == "team") return OperatorKind::team;
  if (mode == "ne") return OperatorKind::game;
  if (mode == "potential") return OperatorKind::potential;
  throw InputError("unknown mode '" + mode + "' (expected team|ne|potential)");
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    atomic_write_file(out, content);
  }
}

// "foo.json" -> "foo"; used to derive the CSV twin of a JSON report.
std::string strip_json_ext(const std::string& path) {
  const std::string ext = ".json";
  if (path.size() > ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size());
  }
  return path;
}

int cmd_validate(const std::string& path) {
  const Scenario sc = load_scenario(path);
  const Network net = build_network(sc.network);
  std::printf("%s: ok (%d nodes, %d edges, %d DMs, %d paths)\n",
              sc.name.c_str(), net.num_nodes(), net.num_edges(), net.num_dms(),
              net.total_paths());
  return kExitOk;
}

int cmd_solve(const std::string& path, const std::string& mode,
              const std::string& out, const std::string& trajectory_out,
              const Overrides& ov) {
  Scenario sc = load_scenario(path);
  apply_overrides(sc, ov);
  const Network net = build_network(sc.network);
  SolverConfig cfg = sc.solver;
  cfg.log_trajectory = !trajectory_out.empty();
  const SolveResult result = solve_dynamics(net, sc.cost, mode_from_string(mode),
                                            cfg, uniform_profile(net));
  emit(out, solve_result_to_json(net, sc.cost, sc.name, mode, result));
  if (!trajectory_out.empty()) {
    atomic_write_file(trajectory_out, trajectory_csv(result));
  }
  return result.converged ? kExitOk : kExitDivergence;
}

int cmd_deviation(const std::string& path, const std::string& out,
                  const Overrides& ov) {
  Scenario sc = load_scenario(path);
  apply_overrides(sc, ov);
  const Network net = build_network(sc.network);
  DeviationReport report = deviation_bound_report(
      net, sc.cost, sc.solver, sc.analysis.s, sc.analysis.q,
      sc.analysis.num_samples);
  report.name = sc.name;
  emit(out.empty() ? "" : strip_json_ext(out) + ".json",
       deviation_report_to_json(net, report));
  if (!out.empty()) {
    atomic_write_file(strip_json_ext(out) + ".csv",
                      deviation_csv_header() + "\n" +
                          deviation_csv_row(report) + "\n");
  }
  return kExitOk;  // inapplicability is reported in-band
}

int cmd_hausdorff(const std::string& path, const std::string& out,
                  const Overrides& ov) {
  Scenario sc = load_scenario(path);
  apply_overrides(sc, ov);
  const Network net = build_network(sc.network);
  HausdorffReport report =
      solution_set_report(net, sc.cost, sc.solver, sc.analysis.eta);
  report.name = sc.name;
  emit(out, hausdorff_report_to_json(net, report));
  return kExitOk;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::string& values_csv, const std::string& out,
              const Overrides& ov) {
  Scenario sc = load_scenario(path);
  apply_overrides(sc, ov);
  const Network net = build_network(sc.network);

  // Only rho entries are sweepable; indices are 1-based like the files.
  int rho_index = 0;
  if (std::sscanf(param.c_str(), "rho[%d]", &rho_index) != 1 ||
      rho_index < 1 || rho_index > net.num_edges()) {
    throw InputError("sweep: unknown parameter '" + param +
                     "' (expected rho[1].." + "rho[" +
                     std::to_string(net.num_edges()) + "])");
  }
  std::vector<double> values;
  std::stringstream ss(values_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (...) {
      throw InputError("sweep: bad value '" + item + "'");
    }
  }
  if (values.empty()) {
    throw InputError("sweep: empty value list");
  }

  std::ostringstream csv;
  csv << "param,value,delta,bound,deviation,cost_team,cost_ne\n";
  for (double v : values) {
    CostModel cm = sc.cost;
    cm.rho[rho_index - 1] = v;
    DeviationReport rep = deviation_bound_report(
        net, cm, sc.solver, sc.analysis.s, sc.analysis.q,
        sc.analysis.num_samples);
    csv << param << ',' << format_double(v) << ','
        << format_double(rep.delta) << ',' << format_double(rep.bound) << ','
        << format_double(rep.deviation) << ','
        << format_double(rep.cost_team) << ',' << format_double(rep.cost_ne)
        << '\n';
  }
  emit(out, csv.str());
  return kExitOk;
}

json claim(const std::string& name, bool passed, json detail) {
  detail["name"] = name;
  detail["passed"] = passed;
  return detail;
}

int finish_suite(const std::string& suite, const std::string& out_dir,
                 const std::vector<std::string>& scenario_files, json claims,
                 json extra) {
  bool all = true;
  for (const json& c : claims) {
    all = all && c.at("passed").get<bool>();
  }
  json summary;
  summary["suite"] = suite;
  summary["scenarios"] = scenario_files;
  summary["claims"] = std::move(claims);
  summary["all_passed"] = all;
  for (auto& [key, value] : extra.items()) {
    summary[key] = value;
  }
  atomic_write_file(out_dir + "/" + suite + "_summary.json",
                    summary.dump(2) + "\n");
  for (const json& c : summary["claims"]) {
    std::printf("[%s] %s\n", c.at("passed").get<bool>() ? "PASS" : "FAIL",
                c.at("name").get<std::string>().c_str());
  }
  return all ? kExitOk : kExitClaimFailed;
}

int cmd_reproduce_impl(const std::string& suite,
                       const std::string& scenarios_dir,
                       const std::string& out_dir, const Overrides& ov);

// A diverging sub-run still leaves a summary behind, with the failure on
// record, before the nonzero exit.
int cmd_reproduce(const std::string& suite, const std::string& scenarios_dir,
                  const std::string& out_dir, const Overrides& ov) {
  try {
    return cmd_reproduce_impl(suite, scenarios_dir, out_dir, ov);
  } catch (const SolverError& e) {
    json summary;
    summary["suite"] = suite;
    summary["all_passed"] = false;
    summary["error"] = e.what();
    atomic_write_file(out_dir + "/" + suite + "_summary.json",
                      summary.dump(2) + "\n");
    throw;
  }
}

int cmd_reproduce_impl(const std::string& suite,
                       const std::string& scenarios_dir,
                       const std::string& out_dir, const Overrides& ov) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  if (suite == "fig3") {
    std::vector<std::string> files;
    json claims = json::array();
    json extra;
    std::ostringstream csv;
    csv << deviation_csv_header() << '\n';
    for (int c = 1; c <= 5; ++c) {
      const std::string file =
          scenarios_dir + "/fig2_case" + std::to_string(c) + ".json";
      files.push_back(file);
      Scenario sc = load_scenario(file);
      apply_overrides(sc, ov);
      const Network net = build_network(sc.network);
      DeviationReport rep = deviation_bound_report(
          net, sc.cost, sc.solver, sc.analysis.s, sc.analysis.q,
          sc.analysis.num_samples);
      rep.name = sc.name;
      csv << deviation_csv_row(rep) << '\n';
      atomic_write_file(out_dir + "/" + sc.name + "_deviation.json",
                        deviation_report_to_json(net, rep));
      claims.push_back(claim(
          sc.name + ": deviation within bound", rep.applicable &&
                                                     rep.bound_satisfied,
          {{"bound", rep.bound}, {"deviation", rep.deviation},
           {"kappa1", rep.kappa1}, {"delta", rep.delta}}));
      extra["mapping_comment"] = sc.comment;
    }
    atomic_write_file(out_dir + "/fig3_deviation.csv", csv.str());
    return finish_suite("fig3", out_dir, files, std::move(claims), extra);
  }

  if (suite == "fig6") {
    const std::string file = scenarios_dir + "/fig5.json";
    Scenario sc = load_scenario(file);
    apply_overrides(sc, ov);
    const Network net = build_network(sc.network);

    CoincidenceReport pot = coincidence_certificate(
        net, sc.cost, sc.solver, OperatorKind::potential, 1e-6);
    pot.name = sc.name;
    CoincidenceReport game = coincidence_certificate(
        net, sc.cost, sc.solver, OperatorKind::game, 1e-6);
    game.name = sc.name;
    atomic_write_file(out_dir + "/fig6_potential_certificate.json",
                      coincidence_report_to_json(pot));
    atomic_write_file(out_dir + "/fig6_noncooperative_certificate.json",
                      coincidence_report_to_json(game));

    // Informational: the invariant sum u_2^1 + u_1^2 + u_1^3 over sampled
    // team optima, alongside the originally reported target value.
    SolutionSet team = multi_start(net, sc.cost, OperatorKind::team, sc.solver);
    double inv_min = std::numeric_limits<double>::infinity();
    double inv_max = -inv_min;
    for (const FlowProfile& u : team.points) {
      const double inv = u.values[net.block_offset(1)] + u.values[1] +
                         u.values[2];
      inv_min = std::min(inv_min, inv);
      inv_max = std::max(inv_max, inv);
    }
    json extra;
    extra["mapping_comment"] = sc.comment;
    extra["invariant_sum_min"] = inv_min;
    extra["invariant_sum_max"] = inv_max;
    extra["invariant_sum_target"] = 11.7931;
    extra["team_points_sampled"] = static_cast<int>(team.points.size());

    json claims = json::array();
    claims.push_back(claim(
        "potential game: sampled team optima and NE coincide", pot.passed,
        {{"hausdorff", pot.hausdorff_distance},
         {"cost_spread", pot.cost_spread}}));
    claims.push_back(claim(
        "non-cooperative game: team optimum is not an NE", !game.passed,
        {{"team_cross_residual", game.max_team_cross_residual}}));
    return finish_suite("fig6", out_dir, {file}, std::move(claims), extra);
  }

  if (suite == "fig7") {
    const std::string file = scenarios_dir + "/fig5.json";
    Scenario sc = load_scenario(file);
    apply_overrides(sc, ov);
    const Network net = build_network(sc.network);
    const int deviator = 1;  // DM2

    StrategyCostTable noncoop = strategy_profile_cost_table(
        net, sc.cost, OperatorKind::game, sc.solver, deviator);
    StrategyCostTable potential = strategy_profile_cost_table(
        net, sc.cost, OperatorKind::potential, sc.solver, deviator);
    atomic_write_file(out_dir + "/fig7_noncooperative_costs.json",
                      cost_table_to_json(net, sc.name, "game", noncoop));
    atomic_write_file(out_dir + "/fig7_potential_costs.json",
                      cost_table_to_json(net, sc.name, "potential", potential));

    json claims = json::array();
    claims.push_back(claim(
        "non-cooperative: C(team) <= C(NE) <= C(mixed)",
        noncoop.cost_team <= noncoop.cost_ne + 1e-9 &&
            noncoop.cost_ne <= noncoop.cost_mixed + 1e-9,
        {{"cost_team", noncoop.cost_team}, {"cost_ne", noncoop.cost_ne},
         {"cost_mixed", noncoop.cost_mixed}}));
    const double spread =
        std::max({potential.cost_team, potential.cost_mixed,
                  potential.cost_ne}) -
        std::min({potential.cost_team, potential.cost_mixed,
                  potential.cost_ne});
    claims.push_back(claim("potential: all three costs equal", spread <= 1e-6,
                           {{"spread", spread}}));
    json extra;
    extra["mapping_comment"] = sc.comment;
    return finish_suite("fig7", out_dir, {file}, std::move(claims), extra);
  }

  throw InputError("unknown reproduce suite '" + suite +
                   "' (expected fig3|fig6|fig7)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowgame: team-optimal and Nash flow assignment toolkit"};
  app.require_subcommand(1);

  Overrides ov;
  std::string scenario_path, out, mode = "team", trajectory_out;
  std::string param, values, suite, scenarios_dir = "scenarios",
                             out_dir = "reproduce_out";

  auto add_common = [&](CLI::App* cmd, bool with_analysis) {
    cmd->add_option("--seed", [&](const CLI::results_t& r) {
      ov.seed = std::stoull(r[0]);
      return true;
    }, "override the scenario RNG seed");
    cmd->add_option("--starts", [&](const CLI::results_t& r) {
      ov.starts = std::stoi(r[0]);
      return true;
    }, "override the number of multi-start runs");
    if (with_analysis) {
      cmd->add_option("--s", [&](const CLI::results_t& r) {
        ov.s = std::stod(r[0]);
        return true;
      }, "deviation-bound constant s in (0,1)");
      cmd->add_option("--q", [&](const CLI::results_t& r) {
        ov.q = std::stod(r[0]);
        return true;
      }, "deviation-bound region radius q (<=0: auto)");
      cmd->add_option("--eta", [&](const CLI::results_t& r) {
        ov.eta = std::stod(r[0]);
        return true;
      }, "gradient-space distance bound eta (<=0: auto)");
      cmd->add_option("--samples", [&](const CLI::results_t& r) {
        ov.samples = std::stoi(r[0]);
        return true;
      }, "number of perturbation-sup samples");
    }
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON path")->required();

  CLI::App* solve = app.add_subcommand("solve", "run the projected dynamics");
  solve->add_option("scenario", scenario_path)->required();
  solve->add_option("--mode", mode, "team|ne|potential (default team)");
  solve->add_option("--out", out, "result JSON path (default stdout)");
  solve->add_option("--trajectory", trajectory_out, "write iter,cost,residual CSV");
  add_common(solve, false);

  CLI::App* deviation = app.add_subcommand("deviation", "deviation-bound report");
  deviation->add_option("scenario", scenario_path)->required();
  deviation->add_option("--out", out, "report base path (writes .json and .csv)");
  add_common(deviation, true);

  CLI::App* hausdorff_cmd = app.add_subcommand("hausdorff", "sampled solution-set report");
  hausdorff_cmd->add_option("scenario", scenario_path)->required();
  hausdorff_cmd->add_option("--out", out, "report JSON path (default stdout)");
  add_common(hausdorff_cmd, true);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one rho entry");
  sweep->add_option("scenario", scenario_path)->required();
  sweep->add_option("--param", param, "parameter name, e.g. rho[1]")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", out, "CSV path (default stdout)");
  add_common(sweep, true);

  CLI::App* reproduce = app.add_subcommand("reproduce", "run a bundled experiment suite");
  reproduce->add_option("suite", suite, "fig3|fig6|fig7")->required();
  reproduce->add_option("--scenarios", scenarios_dir, "scenario directory (default ./scenarios)");
  reproduce->add_option("--out", out_dir, "output directory (default ./reproduce_out)");
  add_common(reproduce, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (solve->parsed())
      return cmd_solve(scenario_path, mode, out, trajectory_out, ov);
    if (deviation->parsed()) return cmd_deviation(scenario_path, out, ov);
    if (hausdorff_cmd->parsed()) return cmd_hausdorff(scenario_path, out, ov);
    if (sweep->parsed()) return cmd_sweep(scenario_path, param, values, out, ov);
    if (reproduce->parsed())
      return cmd_reproduce(suite, scenarios_dir, out_dir, ov);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitDivergence;
  }
  return kExitInput;
}
