#include "atomip/encoding.hpp"

#include <algorithm>

namespace atomip {

LevelScheme::LevelScheme(std::vector<Manifold> manifolds) : manifolds_(std::move(manifolds)) {
  for (auto& m : manifolds_) {
    m.offset = dimension_;
    dimension_ += m.levels;
  }
}

std::size_t LevelScheme::global_index(std::size_t manifold, std::size_t level) const {
  const auto& m = manifolds_.at(manifold);
  if (level >= m.levels) throw std::out_of_range("level outside manifold");
  return m.offset + level;
}

Value LevelScheme::value_of(std::size_t manifold, std::size_t level) const {
  const auto& m = manifolds_.at(manifold);
  if (level >= m.levels) throw std::out_of_range("level outside manifold");
  return m.lo + static_cast<Value>(level);
}

std::size_t LevelScheme::level_of(std::size_t manifold, Value value) const {
  const auto& m = manifolds_.at(manifold);
  if (value < m.lo || value >= m.lo + static_cast<Value>(m.levels))
    throw std::out_of_range("value outside manifold domain");
  return static_cast<std::size_t>(value - m.lo);
}

LevelScheme build_level_scheme(const Problem& p) {
  std::vector<Manifold> manifolds;
  manifolds.reserve(p.num_variables());
  for (std::size_t i = 0; i < p.num_variables(); ++i) {
    const auto& v = p.variables()[i];
    manifolds.push_back({i, v.lo, v.domain_size(), 0});
  }
  return LevelScheme(std::move(manifolds));
}

std::set<Value> singly_infeasible_values(const Constraint& c, std::size_t var,
                                         const std::vector<Variable>& domains,
                                         std::uint64_t cap) {
  const auto vars = c.lhs.variables();
  if (!std::binary_search(vars.begin(), vars.end(), var))
    throw std::invalid_argument("variable does not appear in constraint '" + c.name + "'");
  const auto& dom = domains.at(var);
  std::set<Value> out;

  if (c.lhs.is_linear()) {
    // Best achievable contribution of the other variables, term by term.
    Rational rest = c.lhs.constant();
    for (auto j : vars) {
      if (j == var) continue;
      const Rational a = c.lhs.linear_coefficient(j);
      const Rational at_lo = a * static_cast<long>(domains[j].lo);
      const Rational at_hi = a * static_cast<long>(domains[j].hi);
      if (c.sense == Sense::LessEqual)
        rest += std::min(at_lo, at_hi);
      else
        rest += std::max(at_lo, at_hi);
    }
    const Rational a = c.lhs.linear_coefficient(var);
    for (Value w = dom.lo; w <= dom.hi; ++w) {
      const Rational lhs = a * static_cast<long>(w) + rest;
      if (c.sense == Sense::LessEqual ? lhs > c.rhs : lhs < c.rhs) out.insert(w);
    }
    return out;
  }

  std::vector<std::size_t> others;
  std::vector<Variable> other_domains;
  for (auto j : vars) {
    if (j == var) continue;
    others.push_back(j);
    other_domains.push_back(domains[j]);
  }
  const std::uint64_t completions = box_size(other_domains);
  if (completions > cap)
    throw CapExceeded("singly-infeasible enumeration of " + std::to_string(completions) +
                      " completions exceeds cap");

  Assignment x(domains.size(), 0);
  for (Value w = dom.lo; w <= dom.hi; ++w) {
    x[var] = w;
    for (std::size_t k = 0; k < others.size(); ++k) x[others[k]] = other_domains[k].lo;
    bool satisfiable = false;
    for (std::uint64_t n = 0; n < completions && !satisfiable; ++n) {
      satisfiable = check_constraint(c, x);
      for (std::size_t k = others.size(); k-- > 0;) {
        if (x[others[k]] < other_domains[k].hi) {
          ++x[others[k]];
          break;
        }
        x[others[k]] = other_domains[k].lo;
      }
    }
    if (!satisfiable) out.insert(w);
  }
  return out;
}

namespace {

// Level used by the diagonal-chain rule: min(position, top), moved down to the
// nearest allowed level, or up to the lowest allowed one when nothing below is.
std::size_t diagonal_level(std::size_t position, const std::vector<std::size_t>& allowed) {
  const std::size_t target = std::min(position, allowed.back());
  auto it = std::upper_bound(allowed.begin(), allowed.end(), target);
  if (it == allowed.begin()) return allowed.front();
  return *std::prev(it);
}

}  // namespace

HamiltonianTemplate build_constraint_template(const Problem& p, std::size_t constraint,
                                              const LevelScheme& scheme,
                                              const CouplingPolicy& policy) {
  const Constraint& c = p.constraints().at(constraint);
  HamiltonianTemplate tmpl{constraint, {}};
  const auto vars = c.lhs.variables();

  std::map<std::size_t, std::vector<std::size_t>> allowed;
  for (auto v : vars) {
    const auto excluded = singly_infeasible_values(c, v, p.variables());
    std::vector<std::size_t> levels;
    for (std::size_t k = 0; k < scheme.manifolds()[v].levels; ++k)
      if (!excluded.count(scheme.value_of(v, k))) levels.push_back(k);
    if (levels.empty())
      throw ConstraintUnsatisfiable("constraint '" + c.name + "' excludes every value of '" +
                                    p.variables()[v].name + "'");
    allowed[v] = std::move(levels);
  }

  for (auto v : vars) {
    const auto& lv = allowed[v];
    for (std::size_t k = 1; k < lv.size(); ++k) {
      const std::size_t from = policy.internal == InternalTopology::Star ? lv.front() : lv[k - 1];
      tmpl.slots.push_back(CouplingSlot::internal(v, from, lv[k]));
    }
  }

  if (policy.external == ExternalRule::DiagonalChain) {
    for (std::size_t k = 1; k < vars.size(); ++k) {
      const std::size_t a = vars[k - 1];
      const std::size_t b = vars[k];
      tmpl.slots.push_back(CouplingSlot::external(a, diagonal_level(a, allowed[a]), b,
                                                  diagonal_level(b, allowed[b])));
    }
  } else if (auto it = policy.explicit_external.find(constraint);
             it != policy.explicit_external.end()) {
    for (const auto& s : it->second) {
      if (s.kind != SlotKind::External || s.manifold_a == s.manifold_b)
        throw std::invalid_argument("explicit external slot must join two distinct manifolds");
      for (auto [m, l] : {std::pair{s.manifold_a, s.level_a}, std::pair{s.manifold_b, s.level_b}}) {
        if (m >= scheme.manifolds().size() || l >= scheme.manifolds()[m].levels)
          throw std::invalid_argument("explicit external slot references a missing level");
        auto found = allowed.find(m);
        if (found != allowed.end() &&
            !std::binary_search(found->second.begin(), found->second.end(), l))
          throw std::invalid_argument("explicit external slot touches a singly-infeasible level");
      }
      tmpl.slots.push_back(s);
    }
  }

  std::vector<CouplingSlot> unique;
  for (const auto& s : tmpl.slots)
    if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
  tmpl.slots = std::move(unique);
  return tmpl;
}

std::vector<HamiltonianTemplate> build_templates(const Problem& p, const LevelScheme& scheme,
                                                 const CouplingPolicy& policy) {
  std::vector<HamiltonianTemplate> out;
  for (std::size_t i = 0; i < p.constraints().size(); ++i)
    out.push_back(build_constraint_template(p, i, scheme, policy));
  return out;
}

std::string slot_label(const CouplingSlot& s) {
  if (s.kind == SlotKind::Internal)
    return "Omega^" + std::to_string(s.manifold_a + 1) + "_" + std::to_string(s.level_a) +
           std::to_string(s.level_b);
  return "Omega~(" + std::to_string(s.manifold_a + 1) + "," + std::to_string(s.level_a) + ";" +
         std::to_string(s.manifold_b + 1) + "," + std::to_string(s.level_b) + ")";
}

}  // namespace atomip
