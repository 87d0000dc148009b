#include "flowgame/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flowgame/errors.hpp"

namespace flowgame {

namespace {

using nlohmann::json;

// nlohmann/json renders non-finite numbers as null; reports can legitimately
// carry infinities (vacuous monotonicity constants), so encode those as
// strings.
json json_number(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  if (std::isnan(x)) {
    return "nan";
  }
  return x > 0 ? "inf" : "-inf";
}

json profile_to_json(const Network& net, const FlowProfile& u) {
  json blocks = json::array();
  for (int i = 0; i < net.num_dms(); ++i) {
    json block = json::array();
    for (int k = 0; k < net.num_paths(i); ++k) {
      block.push_back(u.values[net.block_offset(i) + k]);
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

double require_positive(const json& j, const char* key, double value) {
  if (!(value > 0.0)) {
    throw InputError(std::string("scenario: ") + key + " must be positive");
  }
  (void)j;
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Scenario parse_scenario(const std::string& json_text,
                        const std::string& name_hint) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError("scenario: JSON parse error: " + std::string(e.what()));
  }

  try {
    Scenario sc;
    sc.name = doc.value("name", name_hint);
    sc.comment = doc.value("comment", std::string());

    const json& net = doc.at("network");
    sc.network.num_nodes = net.at("nodes").get<int>();
    for (const json& e : net.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw InputError("scenario: each edge must be a [tail, head] pair");
      }
      sc.network.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    for (const json& s : net.at("sources")) {
      SourceSpec src;
      src.node = s.at("node").get<int>();
      src.demand = s.at("demand").get<double>();
      sc.network.sources.push_back(src);
    }
    for (const json& dm_paths : net.at("paths")) {
      std::vector<PathSpec> paths;
      for (const json& p : dm_paths) {
        PathSpec path;
        if (p.is_array()) {
          for (const json& node : p) {
            path.nodes.push_back(node.get<int>());
          }
        } else if (p.is_object() && p.contains("edges")) {
          for (const json& e : p.at("edges")) {
            path.edges.push_back(e.get<int>());
          }
        } else {
          throw InputError(
              "scenario: a path must be a node list or {\"edges\": [...]}");
        }
        paths.push_back(std::move(path));
      }
      sc.network.paths.push_back(std::move(paths));
    }

    const json& cost = doc.at("cost");
    const auto read_vec = [&cost](const char* key) {
      const json& arr = cost.at(key);
      Eigen::VectorXd v(arr.size());
      for (std::size_t l = 0; l < arr.size(); ++l) {
        v[static_cast<Eigen::Index>(l)] = arr[l].get<double>();
      }
      return v;
    };
    sc.cost.rho = read_vec("rho");
    const Eigen::Index L = sc.cost.rho.size();
    sc.cost.a = cost.contains("a") ? read_vec("a") : Eigen::VectorXd::Zero(L);
    sc.cost.b = cost.contains("b") ? read_vec("b") : Eigen::VectorXd::Ones(L);

    if (doc.contains("solver")) {
      const json& sol = doc.at("solver");
      sc.solver.step_size = require_positive(
          sol, "step_size", sol.value("step_size", sc.solver.step_size));
      sc.solver.max_iters = sol.value("max_iters", sc.solver.max_iters);
      sc.solver.residual_tol =
          require_positive(sol, "residual_tol",
                           sol.value("residual_tol", sc.solver.residual_tol));
      sc.solver.seed = sol.value("seed", sc.solver.seed);
      sc.solver.num_starts = sol.value("num_starts", sc.solver.num_starts);
      sc.solver.dedup_tol = sol.value("dedup_tol", sc.solver.dedup_tol);
    }
    if (doc.contains("analysis")) {
      const json& an = doc.at("analysis");
      sc.analysis.s = an.value("s", sc.analysis.s);
      sc.analysis.q = an.value("q", sc.analysis.q);
      sc.analysis.eta = an.value("eta", sc.analysis.eta);
      sc.analysis.num_samples =
          an.value("num_samples", sc.analysis.num_samples);
    }

    // Everything else is validated by build_network / validate_cost_model;
    // run both now so a bad file fails at load time.
    const Network built = build_network(sc.network);
    validate_cost_model(built, sc.cost);
    validate_solver_config(sc.solver);
    if (!(sc.analysis.s > 0.0 && sc.analysis.s < 1.0)) {
      throw InputError("scenario: analysis.s must lie in (0, 1)");
    }
    return sc;
  } catch (const json::exception& e) {
    throw InputError("scenario: schema error: " + std::string(e.what()));
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("scenario: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string stem = std::filesystem::path(path).stem().string();
  return parse_scenario(buf.str(), stem);
}

std::string scenario_to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  if (!sc.comment.empty()) {
    doc["comment"] = sc.comment;
  }
  json net;
  net["nodes"] = sc.network.num_nodes;
  json edges = json::array();
  for (const auto& [tail, head] : sc.network.edges) {
    edges.push_back(json::array({tail, head}));
  }
  net["edges"] = std::move(edges);
  json sources = json::array();
  for (const SourceSpec& s : sc.network.sources) {
    sources.push_back({{"node", s.node}, {"demand", s.demand}});
  }
  net["sources"] = std::move(sources);
  json all_paths = json::array();
  for (const auto& dm_paths : sc.network.paths) {
    json list = json::array();
    for (const PathSpec& p : dm_paths) {
      if (!p.nodes.empty()) {
        list.push_back(p.nodes);
      } else {
        list.push_back({{"edges", p.edges}});
      }
    }
    all_paths.push_back(std::move(list));
  }
  net["paths"] = std::move(all_paths);
  doc["network"] = std::move(net);

  const auto vec_to_json = [](const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index l = 0; l < v.size(); ++l) {
      arr.push_back(v[l]);
    }
    return arr;
  };
  doc["cost"] = {{"rho", vec_to_json(sc.cost.rho)},
                 {"a", vec_to_json(sc.cost.a)},
                 {"b", vec_to_json(sc.cost.b)}};
  doc["solver"] = {{"step_size", sc.solver.step_size},
                   {"max_iters", sc.solver.max_iters},
                   {"residual_tol", sc.solver.residual_tol},
                   {"seed", sc.solver.seed},
                   {"num_starts", sc.solver.num_starts},
                   {"dedup_tol", sc.solver.dedup_tol}};
  doc["analysis"] = {{"s", sc.analysis.s},
                     {"q", sc.analysis.q},
                     {"eta", sc.analysis.eta},
                     {"num_samples", sc.analysis.num_samples}};
  return doc.dump(2) + "\n";
}

std::string solve_result_to_json(const Network& net, const CostModel& cm,
                                 const std::string& name,
                                 const std::string& mode,
                                 const SolveResult& result) {
  json doc;
  doc["scenario"] = name;
  doc["mode"] = mode;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["residual"] = json_number(result.residual);
  doc["step_used"] = result.step_used;
  doc["team_cost"] = json_number(team_cost(net, cm, result.profile));
  json individual = json::array();
  for (int i = 0; i < net.num_dms(); ++i) {
    individual.push_back(
        json_number(individual_cost(net, cm, i, result.profile)));
  }
  doc["individual_costs"] = std::move(individual);
  doc["profile"] = profile_to_json(net, result.profile);
  return doc.dump(2) + "\n";
}

std::string deviation_report_to_json(const Network& net,
                                     const DeviationReport& report) {
  json doc;
  doc["case"] = report.name;
  doc["kappa1"] = json_number(report.kappa1);
  doc["kappa2"] = json_number(report.kappa2);
  doc["delta"] = json_number(report.delta);
  doc["delta_exact"] = report.delta_exact;
  doc["s"] = report.s;
  doc["q"] = json_number(report.q);
  doc["bound"] = json_number(report.bound);
  doc["deviation"] = json_number(report.deviation);
  doc["applicable"] = report.applicable;
  doc["bound_satisfied"] = report.bound_satisfied;
  doc["cost_team"] = json_number(report.cost_team);
  doc["cost_ne"] = json_number(report.cost_ne);
  doc["team_profile"] = profile_to_json(net, report.team_solution);
  doc["ne_profile"] = profile_to_json(net, report.ne_solution);
  return doc.dump(2) + "\n";
}

std::string deviation_csv_header() {
  return "case,kappa1,kappa2,delta,s,q,bound,deviation,bound_satisfied";
}

std::string deviation_csv_row(const DeviationReport& report) {
  std::ostringstream row;
  row << report.name << ',' << format_double(report.kappa1) << ','
      << format_double(report.kappa2) << ',' << format_double(report.delta)
      << ',' << format_double(report.s) << ',' << format_double(report.q)
      << ',' << format_double(report.bound) << ','
      << format_double(report.deviation) << ','
      << (report.bound_satisfied ? "true" : "false");
  return row.str();
}

std::string hausdorff_report_to_json(const Network& net,
                                     const HausdorffReport& report) {
  json doc;
  doc["case"] = report.name;
  doc["kappa2"] = json_number(report.kappa2);
  doc["eta"] = json_number(report.eta);
  doc["h_strategy"] = json_number(report.h_strategy);
  doc["h_gradient"] = json_number(report.h_gradient);
  doc["bound"] = json_number(report.bound);
  doc["gradient_within_eta"] = report.gradient_within_eta;
  doc["bound_satisfied"] = report.bound_satisfied;
  doc["team_points"] = report.team_points;
  doc["ne_points"] = report.ne_points;
  doc["ne_interior"] = report.ne_interior;
  doc["ne_gradient_max"] = json_number(report.ne_gradient_max);
  json team = json::array();
  for (const FlowProfile& u : report.team_set) {
    team.push_back(profile_to_json(net, u));
  }
  doc["team_set"] = std::move(team);
  json ne = json::array();
  for (const FlowProfile& u : report.ne_set) {
    ne.push_back(profile_to_json(net, u));
  }
  doc["ne_set"] = std::move(ne);
  return doc.dump(2) + "\n";
}

std::string coincidence_report_to_json(const CoincidenceReport& report) {
  json doc;
  doc["case"] = report.name;
  doc["ne_family"] =
      report.ne_family == OperatorKind::potential ? "potential" : "game";
  doc["team_points"] = report.team_points;
  doc["ne_points"] = report.ne_points;
  doc["max_team_cross_residual"] =
      json_number(report.max_team_cross_residual);
  doc["max_ne_cross_residual"] = json_number(report.max_ne_cross_residual);
  doc["cost_spread"] = json_number(report.cost_spread);
  doc["hausdorff"] = json_number(report.hausdorff_distance);
  doc["tol"] = report.tol;
  doc["passed"] = report.passed;
  return doc.dump(2) + "\n";
}

std::string cost_table_to_json(const Network& net, const std::string& name,
                               const std::string& family,
                               const StrategyCostTable& table) {
  json doc;
  doc["case"] = name;
  doc["family"] = family;
  doc["deviator"] = table.deviator + 1;  // 1-based for reporting
  doc["cost_team"] = json_number(table.cost_team);
  doc["cost_mixed"] = json_number(table.cost_mixed);
  doc["cost_ne"] = json_number(table.cost_ne);
  doc["team_profile"] = profile_to_json(net, table.team_solution);
  doc["mixed_profile"] = profile_to_json(net, table.mixed_profile);
  doc["ne_profile"] = profile_to_json(net, table.ne_solution);
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(const SolveResult& result) {
  std::ostringstream out;
  out << "iter,cost,residual\n";
  for (const TrajectoryPoint& p : result.trajectory) {
    out << p.iter << ',' << format_double(p.cost) << ','
        << format_double(p.residual) << '\n';
  }
  return out.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot write " + tmp.string());
    }
    out << content;
    if (!out) {
      throw InputError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw InputError("cannot rename " + tmp.string() + " to " + path);
  }
}

}  // namespace flowgame
