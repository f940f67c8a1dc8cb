#include "atomip/control.hpp"

#include <atomic>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace atomip {

ProtocolLayout::ProtocolLayout(const std::vector<HamiltonianTemplate>& templates,
                               const ControlConfig& config)
    : layers_(config.layers),
      tied_(config.tied_layers),
      amp_min_(config.amplitude_min),
      amp_max_(config.amplitude_max),
      tau_min_(config.tau_min),
      tau_max_(config.tau_max),
      max_total_(config.max_total_time) {
  if (layers_ == 0) throw std::invalid_argument("at least one layer is required");
  if (!(tau_min_ > 0.0) || tau_max_ < tau_min_) throw std::invalid_argument("invalid duration bounds");
  if (amp_max_ < amp_min_) throw std::invalid_argument("invalid amplitude bounds");
  const double min_total = tau_min_ * static_cast<double>(layers_ * templates.size());
  if (max_total_ > 0.0 && max_total_ < min_total)
    throw std::invalid_argument("max total time is below layers x constraints x tau_min");
  for (const auto& t : templates) slot_counts_.push_back(t.slots.size());
  std::size_t per_layer = 0;
  for (auto c : slot_counts_) per_layer += 1 + c;
  size_ = static_cast<Eigen::Index>(per_layer * (tied_ ? 1 : layers_));
}

ProtocolParams ProtocolLayout::params(const Eigen::VectorXd& unit) const {
  if (unit.size() != size_) throw std::invalid_argument("parameter vector has wrong size");
  ProtocolParams p;
  p.segments.resize(layers_);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < layers_; ++l) {
    if (tied_ && l > 0) {
      p.segments[l] = p.segments[0];
      continue;
    }
    for (auto count : slot_counts_) {
      SegmentParams seg;
      seg.duration = tau_min_ + std::clamp(unit(pos++), 0.0, 1.0) * (tau_max_ - tau_min_);
      seg.amplitudes.resize(static_cast<Eigen::Index>(count));
      for (std::size_t s = 0; s < count; ++s)
        seg.amplitudes(static_cast<Eigen::Index>(s)) =
            amp_min_ + std::clamp(unit(pos++), 0.0, 1.0) * (amp_max_ - amp_min_);
      p.segments[l].push_back(std::move(seg));
    }
  }

  // Cap the protocol length by shrinking the part of every duration above tau_min.
  const double total = p.total_time();
  if (max_total_ > 0.0 && total > max_total_) {
    const double n = static_cast<double>(layers_ * slot_counts_.size());
    const double scale = (max_total_ - n * tau_min_) / (total - n * tau_min_);
    for (auto& layer : p.segments)
      for (auto& seg : layer) seg.duration = tau_min_ + (seg.duration - tau_min_) * scale;
  }
  return p;
}

StateVector initial_state(const LevelScheme& scheme, const std::vector<HamiltonianTemplate>& templates,
                          InitialState kind) {
  const std::size_t m = scheme.manifolds().size();
  if (m == 0) throw std::invalid_argument("empty level scheme");
  if (kind == InitialState::FirstManifold) return basis_state(scheme, 0, 0);

  // Union-find over manifolds joined by external slots.
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<bool> coupled(m, false);
  for (const auto& t : templates) {
    for (const auto& s : t.slots) {
      coupled[s.manifold_a] = coupled[s.manifold_b] = true;
      const auto a = find(s.manifold_a), b = find(s.manifold_b);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Manifold 1 is always seeded; every other coupled component gets its first manifold.
  std::vector<std::size_t> seeds{0};
  for (std::size_t i = 1; i < m; ++i)
    if (coupled[i] && find(i) == i) seeds.push_back(i);

  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(scheme.dimension()));
  const double amp = 1.0 / std::sqrt(static_cast<double>(seeds.size()));
  for (auto s : seeds) psi(static_cast<Eigen::Index>(scheme.global_index(s, 0))) = amp;
  return psi;
}

ProtocolEvaluator::ProtocolEvaluator(const Problem& problem, const LevelScheme& scheme,
                                     const std::vector<HamiltonianTemplate>& templates,
                                     const ControlConfig& config)
    : problem_(problem),
      scheme_(scheme),
      templates_(templates),
      config_(config),
      layout_(templates, config),
      initial_(initial_state(scheme, templates, config.initial)),
      oracle_(problem) {}

Trajectory ProtocolEvaluator::simulate(const Eigen::VectorXd& unit) const {
  return run_protocol(scheme_, templates_, layout_.params(unit), config_.dt, initial_);
}

ProtocolEvaluator::Outcome ProtocolEvaluator::evaluate(const Eigen::VectorXd& unit) {
  const Trajectory traj = simulate(unit);
  const std::size_t n = traj.samples();
  std::vector<bool> feasible(n);
  std::vector<double> cost(n);
  Outcome out;
  Assignment x;
  for (std::size_t k = 0; k < n; ++k) {
    decode_into(traj.populations.col(static_cast<Eigen::Index>(k)), scheme_, x);
    const auto& e = oracle_.lookup(x);
    feasible[k] = e.feasible;
    cost[k] = e.cost;
    if (e.feasible && (!out.best || e.cost > out.best->cost))
      out.best = FeasibleHit{e.cost, x, traj.times[k]};
  }
  out.objective = multi_objective(feasible, cost);
  return out;
}

namespace {

struct RestartResult {
  RestartTrace trace;
  Eigen::VectorXd best_unit;
  double best_objective = 2.0;
  std::optional<FeasibleHit> best_hit;
  Eigen::VectorXd best_hit_unit;
  std::size_t evaluations = 0;
};

RestartResult run_restart(ProtocolEvaluator& evaluator, const ControlConfig& config,
                          std::size_t index) {
  const std::uint64_t seed = config.seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Index n = evaluator.layout().size();
  Eigen::VectorXd x0(n);
  for (Eigen::Index i = 0; i < n; ++i) x0(i) = uniform(rng);

  RestartResult r;
  r.trace.index = index;
  r.best_unit = x0;
  ObjectiveFunction f = [&](const Eigen::VectorXd& x) {
    auto outcome = evaluator.evaluate(x);
    ++r.evaluations;
    if (outcome.objective < r.best_objective || r.evaluations == 1) {
      r.best_objective = outcome.objective;
      r.best_unit = x;
    }
    if (outcome.best && (!r.best_hit || outcome.best->cost > r.best_hit->cost)) {
      r.best_hit = outcome.best;
      r.best_hit_unit = x;
    }
    if (r.evaluations == 1) r.trace.initial_objective = outcome.objective;
    return outcome.objective;
  };

  const Box box = Box::unit(n);
  NelderMeadConfig nm;
  nm.max_evaluations = static_cast<std::size_t>(
      std::floor(config.nm_fraction * static_cast<double>(config.budget)));
  nm.tolerance = config.nm_tolerance;
  nm.initial_step = config.nm_initial_step;
  const MinimizeResult nm_result = nelder_mead(f, x0, box, nm);
  r.trace.nelder_mead_evaluations = nm_result.evaluations;
  r.trace.nelder_mead_objective = r.best_objective;

  BfgsConfig bfgs;
  bfgs.max_evaluations = config.budget - std::min(config.budget, nm_result.evaluations);
  bfgs.fd_step = config.fd_step;
  bfgs.gradient_tolerance = config.gradient_tolerance;
  if (bfgs.max_evaluations > 0) {
    const MinimizeResult polish = bfgs_fd(f, nm_result.x, box, bfgs);
    r.trace.bfgs_evaluations = polish.evaluations;
    r.trace.bfgs_line_search_failed = polish.line_search_failed;
  }
  r.trace.final_objective = r.best_objective;
  if (r.best_hit) r.trace.best_feasible_cost = r.best_hit->cost;
  return r;
}

}  // namespace

OptimizationReport optimize_protocol(const Problem& problem, const LevelScheme& scheme,
                                     const std::vector<HamiltonianTemplate>& templates,
                                     const ControlConfig& config) {
  if (config.restarts == 0) throw std::invalid_argument("at least one restart is required");
  std::vector<RestartResult> results(config.restarts);
  std::vector<std::exception_ptr> errors(config.restarts);

  auto worker = [&](std::atomic<std::size_t>& next) {
    ProtocolEvaluator evaluator(problem, scheme, templates, config);
    for (std::size_t i = next++; i < config.restarts; i = next++) {
      try {
        results[i] = run_restart(evaluator, config, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  std::atomic<std::size_t> next{0};
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.restarts));
  if (threads == 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, std::ref(next));
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < config.restarts; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw OptimizerAbort(i, e.what());
    }
  }

  OptimizationReport rep;
  rep.seed = config.seed;
  for (std::size_t i = 0; i < config.restarts; ++i) {
    auto& r = results[i];
    rep.evaluations += r.evaluations;
    if (i == 0 || r.best_objective < rep.best_objective) {
      rep.best_objective = r.best_objective;
      rep.best_unit = r.best_unit;
      rep.best_restart = i;
    }
    r.trace.best_so_far = rep.best_objective;
    rep.restarts.push_back(r.trace);
    if (r.best_hit) {
      // Re-verify with the exact model before reporting.
      if (!is_feasible(problem, r.best_hit->assignment))
        throw std::logic_error("decoded assignment reported feasible but violates a constraint");
      Rational exact = evaluate_polynomial(problem.cost(), r.best_hit->assignment);
      if (!rep.best_feasible || exact > rep.best_feasible->cost)
        rep.best_feasible =
            BestFeasible{exact, r.best_hit->assignment, r.best_hit->first_time, i, r.best_hit_unit};
    }
  }
  rep.best_params = ProtocolLayout(templates, config).params(rep.best_unit);
  return rep;
}

}  // namespace atomip
