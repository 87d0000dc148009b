#pragma once

#include <string>

#include "flowgame/cost.hpp"
#include "flowgame/deviation.hpp"
#include "flowgame/network.hpp"
#include "flowgame/solver.hpp"

namespace flowgame {

// Analysis knobs carried by a scenario file. Values <= 0 mean "auto": q is
// grown to cover the strategy set, eta defaults to just above the measured
// gradient-space Hausdorff distance.
struct AnalysisParams {
  double s = 0.5;
  double q = 0.0;
  double eta = 0.0;
  int num_samples = 2000;
};

// One self-contained experiment: network, cost model, solver and analysis
// configuration. The comment field documents scenario-specific conventions
// (e.g. which edge carries which rho index).
struct Scenario {
  std::string name;
  std::string comment;
  NetworkSpec network;
  CostModel cost;
  SolverConfig solver;
  AnalysisParams analysis;
};

// Parses a scenario JSON document. Throws InputError with a readable message
// on I/O failure, malformed JSON, or schema violations. The result has been
// dimension-checked against the network (|rho| = |a| = |b| = L).
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& name_hint);

// Serializes a scenario back to its JSON form (round-trips through
// parse_scenario to an equivalent scenario).
std::string scenario_to_json(const Scenario& sc);

// Report serialization. JSON documents are rendered with sorted keys and
// round-trip double formatting; CSV rows use stable column names.
std::string solve_result_to_json(const Network& net, const CostModel& cm,
                                 const std::string& name,
                                 const std::string& mode,
                                 const SolveResult& result);
std::string deviation_report_to_json(const Network& net,
                                     const DeviationReport& report);
std::string deviation_csv_header();
std::string deviation_csv_row(const DeviationReport& report);
std::string hausdorff_report_to_json(const Network& net,
                                     const HausdorffReport& report);
std::string coincidence_report_to_json(const CoincidenceReport& report);
std::string cost_table_to_json(const Network& net, const std::string& name,
                               const std::string& family,
                               const StrategyCostTable& table);
std::string trajectory_csv(const SolveResult& result);

// Writes content atomically (temp file in the same directory + rename).
// Throws InputError on I/O failure.
void atomic_write_file(const std::string& path, const std::string& content);

// Round-trip decimal formatting used by every CSV emitter.
std::string format_double(double x);

}  // namespace flowgame
