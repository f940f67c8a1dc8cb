#include "atomip/branch_bound.hpp"

#include <chrono>
#include <deque>

namespace atomip {

std::string to_string(Disposition d) {
  switch (d) {
    case Disposition::Branched: return "branched";
    case Disposition::IntegerLeaf: return "integer-leaf";
    case Disposition::InfeasibleLeaf: return "infeasible-leaf";
    case Disposition::Pruned: return "pruned";
  }
  return "unknown";
}

std::string to_string(SearchOrder s) {
  return s == SearchOrder::BestFirst ? "best-first" : "depth-first";
}

namespace {

struct Pending {
  std::size_t id;
  std::optional<std::size_t> parent;
  Rational parent_bound;
  BoundOverrides bounds;
};

}  // namespace

BnBResult solve_bnb(const Problem& p, const BnBConfig& config) {
  if (classify(p) != ProblemClass::Linear)
    throw Unsupported("branch and bound requires a linear problem");

  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = p.num_variables();
  BnBResult res;

  BoundOverrides root_bounds(m);
  for (std::size_t j = 0; j < m; ++j) {
    root_bounds[j].lo = Rational(static_cast<long>(p.variables()[j].lo));
    root_bounds[j].hi = Rational(static_cast<long>(p.variables()[j].hi));
  }
  std::deque<Pending> open;
  open.push_back({0, std::nullopt, 0, root_bounds});
  std::size_t next_id = 1;

  auto pop = [&]() {
    if (config.order == SearchOrder::DepthFirst) {
      Pending n = std::move(open.back());
      open.pop_back();
      return n;
    }
    auto best = open.begin();
    for (auto it = open.begin(); it != open.end(); ++it) {
      if (it->parent_bound > best->parent_bound ||
          (it->parent_bound == best->parent_bound && it->id < best->id))
        best = it;
    }
    Pending n = std::move(*best);
    open.erase(best);
    return n;
  };

  while (!open.empty()) {
    if (res.node_count >= config.max_nodes) {
      res.limit_reached = true;
      break;
    }
    if (config.max_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
            config.max_seconds) {
      res.limit_reached = true;
      break;
    }

    Pending cur = pop();
    BnBNode node{cur.id, cur.parent, cur.bounds, solve_lp_relaxation(p, cur.bounds),
                 Disposition::Pruned, std::nullopt};
    ++res.node_count;

    if (node.lp.status != LpStatus::Optimal) {
      node.disposition = Disposition::InfeasibleLeaf;
      res.trace.push_back(std::move(node));
      continue;
    }

    std::optional<std::size_t> branch_var;
    Rational best_frac = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Rational frac = node.lp.point[j] - Rational(floor_of(node.lp.point[j]));
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (!branch_var) {
      node.disposition = Disposition::IntegerLeaf;
      if (!res.feasible || node.lp.value > res.value) {
        res.feasible = true;
        res.value = node.lp.value;
        res.assignment.resize(m);
        for (std::size_t j = 0; j < m; ++j)
          res.assignment[j] = static_cast<Value>(node.lp.point[j].get_num().get_si());
      }
      res.trace.push_back(std::move(node));
      continue;
    }

    if (res.feasible && node.lp.value <= res.value) {
      node.disposition = Disposition::Pruned;
      res.trace.push_back(std::move(node));
      continue;
    }

    node.disposition = Disposition::Branched;
    node.branch_variable = branch_var;
    const std::size_t j = *branch_var;
    const Rational fl(floor_of(node.lp.point[j]));
    Pending down{next_id++, node.id, node.lp.value, node.bounds};
    down.bounds[j].hi = fl;
    Pending up{next_id++, node.id, node.lp.value, node.bounds};
    up.bounds[j].lo = fl + 1;
    if (config.order == SearchOrder::DepthFirst) {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    } else {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    }
    res.trace.push_back(std::move(node));
  }
  return res;
}

}  // namespace atomip
