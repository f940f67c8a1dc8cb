#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "atomip/dynamics.hpp"
#include "atomip/encoding.hpp"
#include "atomip/problem.hpp"

namespace atomip {

/// Per manifold, the value of the most populated level. Ties within 1e-12
/// (an empty manifold included) go to the lowest value.
Assignment decode(const Eigen::Ref<const Eigen::VectorXd>& populations, const LevelScheme& scheme);
void decode_into(const Eigen::Ref<const Eigen::VectorXd>& populations, const LevelScheme& scheme,
                 Assignment& out);

/// Memoized exact feasibility and cost of assignments. Not thread-safe; give
/// each concurrent evaluator its own instance.
class AssignmentOracle {
 public:
  struct Entry {
    bool feasible = false;
    double cost = 0.0;
  };

  explicit AssignmentOracle(const Problem& p);

  const Entry& lookup(const Assignment& x);
  const Problem& problem() const { return *problem_; }

 private:
  Entry compute(const Assignment& x) const;

  const Problem* problem_;
  std::vector<std::uint64_t> radix_;
  std::vector<Entry> table_;
  std::vector<std::uint8_t> filled_;
  std::unordered_map<std::uint64_t, Entry> overflow_;
  bool dense_ = false;
};

struct DecodedSeries {
  std::vector<double> times;
  std::vector<Assignment> assignments;
  std::vector<bool> feasible;
  std::vector<double> cost;

  std::size_t size() const { return times.size(); }
};

/// Decodes every `stride`-th sample of a trajectory (always starting at t = 0).
DecodedSeries decode_series(const Trajectory& traj, const LevelScheme& scheme,
                            AssignmentOracle& oracle, std::size_t stride = 1);

/// Indices of samples whose decoded assignment satisfies every constraint,
/// checked exactly.
std::vector<std::size_t> feasible_set(const DecodedSeries& series,
                                      const std::vector<Constraint>& constraints);

struct ObjectiveReport {
  double value = 2.0;  // O
  std::size_t n_tau = 0;
  std::size_t n_total = 0;
  std::vector<std::size_t> s_tau;
  std::optional<Rational> best_cost;  // best feasible decoded cost, exact
  Assignment best_assignment;
  double first_attainment = 0.0;      // first time the best feasible cost appears
};

/// O = (1 - N_tau/N_T) + (1 - sum_{S_tau} C_f / sum_all C_f); the second term
/// is clamped to [0, 1]. With a vanishing total cost it is 0 when every
/// sample is feasible and 1 otherwise.
ObjectiveReport objective_value(const DecodedSeries& series, const Problem& problem);

/// Same formula on raw per-sample flags and costs.
double multi_objective(const std::vector<bool>& feasible, const std::vector<double>& cost);

}  // namespace atomip
