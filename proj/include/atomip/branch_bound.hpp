#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "atomip/problem.hpp"
#include "atomip/relaxation.hpp"

namespace atomip {

enum class Disposition { Branched, IntegerLeaf, InfeasibleLeaf, Pruned };
enum class SearchOrder { BestFirst, DepthFirst };

std::string to_string(Disposition d);
std::string to_string(SearchOrder s);

struct BnBNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  BoundOverrides bounds;  // integer bounds, one entry per variable
  LpSolution lp;
  Disposition disposition = Disposition::Pruned;
  std::optional<std::size_t> branch_variable;
};

struct BnBConfig {
  SearchOrder order = SearchOrder::BestFirst;
  std::size_t max_nodes = 100000;
  double max_seconds = 0.0;  // 0: no time limit
};

struct BnBResult {
  bool feasible = false;
  Rational value;
  Assignment assignment;
  std::size_t node_count = 0;  // LP-solved nodes, root included
  bool limit_reached = false;
  std::vector<BnBNode> trace;  // in solve order
};

/// LP-relaxation branch and bound for linear problems (maximization). Branches
/// on the variable with the largest fractional part (lowest index on ties)
/// into x <= floor(v) and x >= floor(v) + 1. Best-first pops the highest
/// parent bound, lowest node id on ties; depth-first pops the newest node,
/// "x <= floor(v)" child first.
BnBResult solve_bnb(const Problem& p, const BnBConfig& config = {});

}  // namespace atomip
