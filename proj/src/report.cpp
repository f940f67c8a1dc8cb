#include "atomip/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "atomip/parser.hpp"
#include "atomip/relaxation.hpp"

namespace atomip {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : "nan";
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json base_report(const Problem& p, std::string_view mode) {
  Json j;
  j["tool"] = "atomip";
  j["version"] = kToolVersion;
  j["mode"] = mode;
  j["problem"] = {{"digest", problem_digest(p)}, {"canonical", format_problem(p)}};
  return j;
}

Json series_intervals(const DecodedSeries& s) {
  Json out = Json::array();
  std::size_t k = 0;
  while (k < s.size()) {
    if (!s.feasible[k]) {
      ++k;
      continue;
    }
    const std::size_t start = k;
    while (k < s.size() && s.feasible[k]) ++k;
    out.push_back({s.times[start], s.times[k - 1]});
  }
  return out;
}

}  // namespace

std::string problem_digest(const Problem& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : format_problem(p)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MetricsResult compute_metrics(const Problem& p, std::uint64_t cap) {
  MetricsResult r;
  const BruteForceResult brute = brute_force_optimum(p, cap);
  r.integer_feasible = brute.feasible;
  r.metrics.v_int = brute.value;
  if (classify(p) == ProblemClass::Linear) {
    const LpSolution lp = solve_lp_relaxation(p);
    r.relaxation_method = "simplex";
    r.relaxation_feasible = lp.status == LpStatus::Optimal;
    r.metrics.v_cont = lp.value;
  } else {
    const GridSolution g = solve_relaxation_grid(p);
    r.relaxation_method = "grid";
    r.relaxation_feasible = g.feasible;
    r.metrics.v_cont = g.value;
  }
  r.metrics.b1 = r.integer_feasible && r.relaxation_feasible
                     ? metric_b1(r.metrics.v_int, r.metrics.v_cont)
                     : std::nan("");
  r.metrics.b2 = metric_b2(p);
  r.metrics.b3 = metric_b3(p);
  r.metrics.n_tot = p.num_variables();
  r.metrics.n_bin = count_binary(p);
  r.metrics.n_int = r.metrics.n_tot - r.metrics.n_bin;
  return r;
}

SolveRun run_solve(const Problem& p, const RunConfig& config) {
  validate(config);
  SolveRun run;
  run.scheme = build_level_scheme(p);
  run.templates = build_templates(p, run.scheme, resolve_policy(config, p, run.scheme));
  run.optimization = optimize_protocol(p, run.scheme, run.templates, config.control);

  const ProtocolEvaluator evaluator(p, run.scheme, run.templates, config.control);
  run.trajectory = evaluator.simulate(run.optimization.best_unit);
  AssignmentOracle oracle(p);
  run.stride = static_cast<std::size_t>(std::llround(config.report_dt / config.control.dt));
  run.fine = decode_series(run.trajectory, run.scheme, oracle, 1);
  run.reported = decode_series(run.trajectory, run.scheme, oracle, run.stride);
  run.reporting = objective_value(run.reported, p);
  return run;
}

Json assignment_json(const Problem& p, const Assignment& x) {
  Json j = Json::object();
  for (std::size_t i = 0; i < x.size(); ++i) j[p.variables()[i].name] = x[i];
  return j;
}

Json config_json(const RunConfig& c) {
  const auto& k = c.control;
  Json j;
  j["seed"] = k.seed;
  j["restarts"] = k.restarts;
  j["layers"] = k.layers;
  j["budget"] = k.budget;
  j["nm_fraction"] = k.nm_fraction;
  j["dt"] = k.dt;
  j["report_dt"] = c.report_dt;
  j["amplitude_min"] = k.amplitude_min;
  j["amplitude_max"] = k.amplitude_max;
  j["tau_min"] = k.tau_min;
  j["tau_max"] = k.tau_max;
  j["max_total_time"] = k.max_total_time;
  j["tied_layers"] = k.tied_layers;
  j["initial"] = to_string(k.initial);
  j["threads"] = k.threads;
  j["nm_tolerance"] = k.nm_tolerance;
  j["nm_initial_step"] = k.nm_initial_step;
  j["fd_step"] = k.fd_step;
  j["gradient_tolerance"] = k.gradient_tolerance;
  j["internal_topology"] = to_string(c.internal);
  j["external_rule"] = to_string(c.external);
  Json ext = Json::object();
  for (const auto& [name, list] : c.explicit_external) {
    Json arr = Json::array();
    for (const auto& cp : list)
      arr.push_back(cp.a.variable + ":" + std::to_string(cp.a.value) + "-" + cp.b.variable + ":" +
                    std::to_string(cp.b.value));
    ext[name] = std::move(arr);
  }
  j["external"] = std::move(ext);
  return j;
}

Json metrics_report(const Problem& p, const MetricsResult& r) {
  Json j = base_report(p, "metrics");
  const auto& m = r.metrics;
  Json res;
  res["class"] = classify(p) == ProblemClass::Linear ? "linear" : "nonlinear";
  res["b1_percent"] = number_or_null(m.b1);
  res["b2_percent"] = m.b2;
  res["b3_percent"] = m.b3;
  res["v_int"] = r.integer_feasible ? Json(to_string(m.v_int)) : Json(nullptr);
  res["v_cont"] = r.relaxation_feasible ? Json(to_string(m.v_cont)) : Json(nullptr);
  res["v_cont_method"] = r.relaxation_method;
  res["n_tot"] = m.n_tot;
  res["n_int"] = m.n_int;
  res["n_bin"] = m.n_bin;
  j["results"] = std::move(res);
  j["conventions"] = {
      "b1 = |V_int - V_cont| / max(|V_int|, 1e-3) * 100, exact rationals",
      "V_cont from the exact simplex for linear problems, otherwise a refined grid lower bound",
      "b3 counts binary variables and non-binary integer variables separately"};
  return j;
}

Json solve_report(const Problem& p, const RunConfig& config, const SolveRun& run) {
  Json j = base_report(p, "solve");
  j["seed"] = config.control.seed;
  j["config"] = config_json(config);
  const auto& opt = run.optimization;

  Json templates = Json::array();
  for (const auto& t : run.templates) {
    Json slots = Json::array();
    for (const auto& s : t.slots) slots.push_back(slot_label(s));
    templates.push_back({{"constraint", p.constraints()[t.constraint].name}, {"slots", slots}});
  }

  Json res;
  res["dimension"] = run.scheme.dimension();
  res["templates"] = std::move(templates);
  if (opt.best_feasible) {
    const auto& b = *opt.best_feasible;
    res["best_feasible"] = {{"cost", to_string(b.cost)},
                            {"assignment", assignment_json(p, b.assignment)},
                            {"first_attainment_us", b.first_time},
                            {"restart", b.restart}};
  } else {
    res["best_feasible"] = nullptr;
  }
  res["best_objective"] = opt.best_objective;
  res["best_restart"] = opt.best_restart;
  res["evaluations"] = opt.evaluations;

  // The best-O protocol, re-simulated.
  Json layers = Json::array();
  for (const auto& layer : opt.best_params.segments) {
    Json segs = Json::array();
    for (std::size_t c = 0; c < layer.size(); ++c) {
      Json amps = Json::object();
      for (std::size_t s = 0; s < run.templates[c].slots.size(); ++s)
        amps[slot_label(run.templates[c].slots[s])] = layer[c].amplitudes(static_cast<Eigen::Index>(s));
      segs.push_back({{"constraint", p.constraints()[c].name},
                      {"duration_us", layer[c].duration},
                      {"amplitudes", std::move(amps)}});
    }
    layers.push_back(std::move(segs));
  }
  Json best;
  best["total_time_us"] = run.trajectory.total_time;
  best["layers"] = std::move(layers);
  best["objective_fine"] = multi_objective(run.fine.feasible, run.fine.cost);
  best["objective_reported"] = run.reporting.value;
  best["n_total"] = run.reporting.n_total;
  best["n_feasible"] = run.reporting.n_tau;
  best["best_cost"] =
      run.reporting.best_cost ? Json(to_string(*run.reporting.best_cost)) : Json(nullptr);
  best["best_assignment"] = run.reporting.best_cost
                                ? assignment_json(p, run.reporting.best_assignment)
                                : Json(nullptr);
  best["first_attainment_us"] =
      run.reporting.best_cost ? Json(run.reporting.first_attainment) : Json(nullptr);
  best["feasible_intervals_us"] = series_intervals(run.fine);
  res["best_protocol"] = std::move(best);

  Json restarts = Json::array();
  for (const auto& r : opt.restarts) {
    restarts.push_back({{"index", r.index},
                        {"initial_objective", r.initial_objective},
                        {"nelder_mead_objective", r.nelder_mead_objective},
                        {"final_objective", r.final_objective},
                        {"best_so_far", r.best_so_far},
                        {"nelder_mead_evaluations", r.nelder_mead_evaluations},
                        {"bfgs_evaluations", r.bfgs_evaluations},
                        {"bfgs_line_search_failed", r.bfgs_line_search_failed},
                        {"best_feasible_cost", r.best_feasible_cost ? Json(*r.best_feasible_cost)
                                                                     : Json(nullptr)}});
  }
  res["restarts"] = std::move(restarts);
  j["results"] = std::move(res);

  j["timing"] = {{"simulated_total_us", run.trajectory.total_time},
                 {"fine_samples", run.fine.size()},
                 {"reported_samples", run.reported.size()},
                 {"objective_evaluations", opt.evaluations}};
  j["conventions"] = {
      "decoding: argmax population per variable, ties within 1e-12 go to the lowest value",
      "optimizer objective uses every dt sample; objective_reported uses every report_dt sample, t = 0 included",
      "best_feasible is the best exactly re-verified decoded assignment seen at any evaluated protocol",
      "durations above tau_min are rescaled when the protocol exceeds max_total_time",
      "timing lists simulated quantities only, so reports are byte-identical across runs"};
  return j;
}

Json aborted_solve_report(const Problem& p, const RunConfig& config, const OptimizerAbort& e) {
  Json j = base_report(p, "solve");
  j["seed"] = config.control.seed;
  j["config"] = config_json(config);
  j["results"] = {{"error", e.what()}, {"restart", e.restart()}};
  return j;
}

Json bnb_report(const Problem& p, const BnBConfig& config, const BnBResult& r) {
  Json j = base_report(p, "bnb");
  j["config"] = {{"order", to_string(config.order)}, {"max_nodes", config.max_nodes}};
  Json res;
  res["feasible"] = r.feasible;
  res["value"] = r.feasible ? Json(to_string(r.value)) : Json(nullptr);
  res["assignment"] = r.feasible ? assignment_json(p, r.assignment) : Json(nullptr);
  res["node_count"] = r.node_count;
  res["limit_reached"] = r.limit_reached;
  j["results"] = std::move(res);
  j["conventions"] = {
      "node count = LP relaxations solved, root included",
      "order: " + to_string(config.order) +
          (config.order == SearchOrder::BestFirst ? " by parent bound, ties to the lower node id"
                                                  : ", x <= floor(v) child first"),
      "branch on the largest fractional part, ties to the lowest variable index",
      "a node is pruned when its bound is <= the incumbent"};
  return j;
}

Json bnb_trace(const Problem& p, const BnBResult& r) {
  Json out = Json::array();
  for (const auto& n : r.trace) {
    Json bounds = Json::object();
    for (std::size_t i = 0; i < n.bounds.size(); ++i)
      bounds[p.variables()[i].name] = {n.bounds[i].lo ? to_string(*n.bounds[i].lo) : "",
                                       n.bounds[i].hi ? to_string(*n.bounds[i].hi) : ""};
    Json lp;
    lp["status"] = n.lp.status == LpStatus::Optimal      ? "optimal"
                   : n.lp.status == LpStatus::Infeasible ? "infeasible"
                                                         : "unbounded";
    if (n.lp.status == LpStatus::Optimal) {
      lp["value"] = to_string(n.lp.value);
      Json point = Json::object();
      for (std::size_t i = 0; i < n.lp.point.size(); ++i)
        point[p.variables()[i].name] = to_string(n.lp.point[i]);
      lp["point"] = std::move(point);
    }
    out.push_back({{"id", n.id},
                   {"parent", n.parent ? Json(*n.parent) : Json(nullptr)},
                   {"bounds", std::move(bounds)},
                   {"lp", std::move(lp)},
                   {"disposition", to_string(n.disposition)},
                   {"branch_variable", n.branch_variable
                                           ? Json(p.variables()[*n.branch_variable].name)
                                           : Json(nullptr)}});
  }
  return out;
}

Json brute_report(const Problem& p, const BruteForceResult& r) {
  Json j = base_report(p, "brute");
  Json res;
  res["feasible"] = r.feasible;
  res["value"] = r.feasible ? Json(to_string(r.value)) : Json(nullptr);
  Json argmax = Json::array();
  for (const auto& x : r.argmax) argmax.push_back(assignment_json(p, x));
  res["argmax"] = std::move(argmax);
  res["enumerated"] = r.enumerated;
  j["results"] = std::move(res);
  return j;
}

std::string trajectory_csv(const Problem& p, const SolveRun& run) {
  std::string out = "t_us";
  for (const auto& m : run.scheme.manifolds())
    for (std::size_t k = 0; k < m.levels; ++k)
      out += ",p_" + p.variables()[m.variable].name + "_" + std::to_string(m.lo + static_cast<Value>(k));
  for (const auto& v : p.variables()) out += ",x_" + v.name;
  out += ",feasible,cost\n";

  const auto& s = run.reported;
  for (std::size_t r = 0; r < s.size(); ++r) {
    const auto col = static_cast<Eigen::Index>(r * run.stride);
    out += format_double(s.times[r]);
    for (Eigen::Index d = 0; d < run.trajectory.populations.rows(); ++d)
      out += "," + format_double(run.trajectory.populations(d, col));
    for (auto v : s.assignments[r]) out += "," + std::to_string(v);
    out += s.feasible[r] ? ",1," : ",0,";
    out += to_string(evaluate_polynomial(p.cost(), s.assignments[r]));
    out += '\n';
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace atomip
