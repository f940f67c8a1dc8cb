#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "atomip/problem.hpp"

namespace atomip {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> point;
};

/// Per-variable bound overrides; an unset side falls back to the domain bound.
struct VariableBounds {
  std::optional<Rational> lo;
  std::optional<Rational> hi;
};
using BoundOverrides = std::vector<VariableBounds>;

/// Continuous relaxation of a linear problem over its domain box (optionally
/// tightened), solved exactly by a two-phase tableau simplex with Bland's rule.
/// Throws Unsupported for nonlinear problems.
LpSolution solve_lp_relaxation(const Problem& p, const BoundOverrides& overrides = {});

struct GridConfig {
  Rational initial_step = make_rational(1, 10);
  int refinement_levels = 3;  // each level shrinks the step tenfold
  std::size_t max_dimension = 6;
};

struct GridSolution {
  bool feasible = false;  // false: no feasible point at this resolution
  Rational value;         // lower bound on the relaxation optimum
  std::vector<Rational> point;
  Rational final_step;
};

/// Grid search with successive local refinement around the incumbent. Works for
/// nonlinear problems; the value is only a lower bound. Feasibility and values
/// of accepted points are verified in exact arithmetic; ties keep the
/// lexicographically smallest point.
GridSolution solve_relaxation_grid(const Problem& p, const GridConfig& config = {});

}  // namespace atomip
