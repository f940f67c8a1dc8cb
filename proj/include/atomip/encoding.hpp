#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomip/problem.hpp"

namespace atomip {

/// Levels of one variable; level k encodes the value lo + k.
struct Manifold {
  std::size_t variable = 0;
  Value lo = 0;
  std::size_t levels = 0;
  std::size_t offset = 0;  // global index of level 0
};

class LevelScheme {
 public:
  LevelScheme() = default;
  explicit LevelScheme(std::vector<Manifold> manifolds);

  const std::vector<Manifold>& manifolds() const { return manifolds_; }
  std::size_t dimension() const { return dimension_; }

  std::size_t global_index(std::size_t manifold, std::size_t level) const;
  Value value_of(std::size_t manifold, std::size_t level) const;
  std::size_t level_of(std::size_t manifold, Value value) const;

 private:
  std::vector<Manifold> manifolds_;
  std::size_t dimension_ = 0;
};

LevelScheme build_level_scheme(const Problem& p);

enum class SlotKind { Internal, External };

/// One coupling term. Internal: levels (level_a, level_b) of manifold_a.
/// External: (manifold_a, level_a) <-> (manifold_b, level_b).
struct CouplingSlot {
  SlotKind kind = SlotKind::Internal;
  std::size_t manifold_a = 0;
  std::size_t level_a = 0;
  std::size_t manifold_b = 0;
  std::size_t level_b = 0;

  static CouplingSlot internal(std::size_t m, std::size_t i, std::size_t j) {
    return {SlotKind::Internal, m, i, m, j};
  }
  static CouplingSlot external(std::size_t m, std::size_t l, std::size_t r, std::size_t k) {
    return {SlotKind::External, m, l, r, k};
  }

  auto operator<=>(const CouplingSlot&) const = default;
};

struct HamiltonianTemplate {
  std::size_t constraint = 0;
  std::vector<CouplingSlot> slots;
};

enum class InternalTopology { Star, Chain };
enum class ExternalRule { DiagonalChain, Explicit };

struct CouplingPolicy {
  InternalTopology internal = InternalTopology::Star;
  ExternalRule external = ExternalRule::DiagonalChain;
  /// Used with ExternalRule::Explicit, keyed by constraint index. Constraints
  /// without an entry get no external slots.
  std::map<std::size_t, std::vector<CouplingSlot>> explicit_external;
};

class ConstraintUnsatisfiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSinglyInfeasibleCap = 1'000'000;

/// Values of variable `var` that no completion of the constraint's other
/// variables (within their domains) can satisfy.
std::set<Value> singly_infeasible_values(const Constraint& c, std::size_t var,
                                         const std::vector<Variable>& domains,
                                         std::uint64_t cap = kDefaultSinglyInfeasibleCap);

HamiltonianTemplate build_constraint_template(const Problem& p, std::size_t constraint,
                                              const LevelScheme& scheme,
                                              const CouplingPolicy& policy = {});

std::vector<HamiltonianTemplate> build_templates(const Problem& p, const LevelScheme& scheme,
                                                 const CouplingPolicy& policy = {});

/// Human-readable slot label, e.g. "Omega^1_01" or "Omega~(1,0;2,1)" (1-based manifolds).
std::string slot_label(const CouplingSlot& s);

}  // namespace atomip
