#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "atomip/branch_bound.hpp"
#include "atomip/control.hpp"
#include "atomip/objective.hpp"
#include "atomip/problem.hpp"
#include "atomip/run_config.hpp"

namespace atomip {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64 of the canonical problem text, as "fnv1a64:<16 hex digits>".
std::string problem_digest(const Problem& p);

struct MetricsResult {
  Metrics metrics;
  bool integer_feasible = false;
  bool relaxation_feasible = false;
  std::string relaxation_method;  // "simplex" or "grid"
};

/// V_int by enumeration, V_cont by simplex (linear) or grid search (nonlinear).
MetricsResult compute_metrics(const Problem& p, std::uint64_t cap = kDefaultEnumerationCap);

/// A quantum-solve run: optimization plus re-simulation of the best protocol.
struct SolveRun {
  LevelScheme scheme;
  std::vector<HamiltonianTemplate> templates;
  OptimizationReport optimization;
  Trajectory trajectory;  // best-O protocol on the dt grid
  DecodedSeries fine;      // every dt sample
  DecodedSeries reported;  // every report_dt sample
  ObjectiveReport reporting;
  std::size_t stride = 1;
};

SolveRun run_solve(const Problem& p, const RunConfig& config);

Json assignment_json(const Problem& p, const Assignment& x);
Json config_json(const RunConfig& config);
Json metrics_report(const Problem& p, const MetricsResult& m);
Json solve_report(const Problem& p, const RunConfig& config, const SolveRun& run);
/// Report for a run whose optimizer aborted; `results` carries the error.
Json aborted_solve_report(const Problem& p, const RunConfig& config, const OptimizerAbort& e);
Json bnb_report(const Problem& p, const BnBConfig& config, const BnBResult& result);
Json bnb_trace(const Problem& p, const BnBResult& result);
Json brute_report(const Problem& p, const BruteForceResult& result);

/// `t_us,p_<var>_<value>...,x_<var>...,feasible,cost`, one row per reporting sample.
std::string trajectory_csv(const Problem& p, const SolveRun& run);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace atomip
