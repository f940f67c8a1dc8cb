#include "atomip/objective.hpp"

#include <algorithm>

namespace atomip {

namespace {
constexpr double kTieTolerance = 1e-12;
constexpr double kZeroTotal = 1e-12;
constexpr std::uint64_t kDenseTableLimit = std::uint64_t{1} << 22;
}  // namespace

Assignment decode(const Eigen::Ref<const Eigen::VectorXd>& populations, const LevelScheme& scheme) {
  Assignment x;
  decode_into(populations, scheme, x);
  return x;
}

void decode_into(const Eigen::Ref<const Eigen::VectorXd>& populations, const LevelScheme& scheme,
                 Assignment& x) {
  if (static_cast<std::size_t>(populations.size()) != scheme.dimension())
    throw std::invalid_argument("population vector has wrong dimension");
  x.clear();
  for (const auto& m : scheme.manifolds()) {
    std::size_t best = 0;
    double best_p = populations(static_cast<Eigen::Index>(m.offset));
    for (std::size_t k = 1; k < m.levels; ++k) {
      const double p = populations(static_cast<Eigen::Index>(m.offset + k));
      if (p > best_p + kTieTolerance) {
        best = k;
        best_p = p;
      }
    }
    x.push_back(m.lo + static_cast<Value>(best));
  }
}

AssignmentOracle::AssignmentOracle(const Problem& p) : problem_(&p) {
  std::uint64_t r = 1;
  radix_.resize(p.num_variables());
  for (std::size_t i = p.num_variables(); i-- > 0;) {
    radix_[i] = r;
    r *= p.variables()[i].domain_size();
  }
  const std::uint64_t total = box_size(p.variables());
  dense_ = total <= kDenseTableLimit;
  if (dense_) {
    table_.resize(total);
    filled_.assign(total, 0);
  }
}

AssignmentOracle::Entry AssignmentOracle::compute(const Assignment& x) const {
  Entry e;
  e.feasible = is_feasible(*problem_, x);
  e.cost = to_double(evaluate_polynomial(problem_->cost(), x));
  return e;
}

const AssignmentOracle::Entry& AssignmentOracle::lookup(const Assignment& x) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    key += static_cast<std::uint64_t>(x[i] - problem_->variables()[i].lo) * radix_[i];
  if (dense_) {
    if (!filled_[key]) {
      table_[key] = compute(x);
      filled_[key] = 1;
    }
    return table_[key];
  }
  auto it = overflow_.find(key);
  if (it == overflow_.end()) it = overflow_.emplace(key, compute(x)).first;
  return it->second;
}

DecodedSeries decode_series(const Trajectory& traj, const LevelScheme& scheme,
                            AssignmentOracle& oracle, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  DecodedSeries out;
  const std::size_t n = traj.samples();
  const std::size_t count = n == 0 ? 0 : (n - 1) / stride + 1;
  out.times.reserve(count);
  out.assignments.reserve(count);
  out.feasible.reserve(count);
  out.cost.reserve(count);
  for (std::size_t k = 0; k < n; k += stride) {
    Assignment x = decode(traj.populations.col(static_cast<Eigen::Index>(k)), scheme);
    const auto& entry = oracle.lookup(x);
    out.times.push_back(traj.times[k]);
    out.feasible.push_back(entry.feasible);
    out.cost.push_back(entry.cost);
    out.assignments.push_back(std::move(x));
  }
  return out;
}

std::vector<std::size_t> feasible_set(const DecodedSeries& series,
                                      const std::vector<Constraint>& constraints) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& x = series.assignments[k];
    if (std::all_of(constraints.begin(), constraints.end(),
                    [&](const Constraint& c) { return check_constraint(c, x); }))
      out.push_back(k);
  }
  return out;
}

double multi_objective(const std::vector<bool>& feasible, const std::vector<double>& cost) {
  const std::size_t n_total = feasible.size();
  if (n_total == 0) return 2.0;
  std::size_t n_tau = 0;
  double feasible_sum = 0.0;
  double total_sum = 0.0;
  for (std::size_t k = 0; k < n_total; ++k) {
    total_sum += cost[k];
    if (feasible[k]) {
      ++n_tau;
      feasible_sum += cost[k];
    }
  }
  const double coverage = 1.0 - static_cast<double>(n_tau) / static_cast<double>(n_total);
  double quality;
  if (n_tau == n_total) {
    quality = 0.0;
  } else if (std::abs(total_sum) <= kZeroTotal) {
    quality = 1.0;
  } else {
    quality = std::clamp(1.0 - feasible_sum / total_sum, 0.0, 1.0);
  }
  return coverage + quality;
}

ObjectiveReport objective_value(const DecodedSeries& series, const Problem& problem) {
  ObjectiveReport rep;
  rep.n_total = series.size();
  rep.s_tau = feasible_set(series, problem.constraints());
  rep.n_tau = rep.s_tau.size();

  std::vector<bool> flags(series.size(), false);
  std::vector<double> cost(series.size());
  for (std::size_t k = 0; k < series.size(); ++k)
    cost[k] = to_double(evaluate_polynomial(problem.cost(), series.assignments[k]));
  for (auto k : rep.s_tau) {
    flags[k] = true;
    Rational c = evaluate_polynomial(problem.cost(), series.assignments[k]);
    if (!rep.best_cost || c > *rep.best_cost) {
      rep.best_cost = c;
      rep.best_assignment = series.assignments[k];
      rep.first_attainment = series.times[k];
    }
  }
  rep.value = multi_objective(flags, cost);
  return rep;
}

}  // namespace atomip
