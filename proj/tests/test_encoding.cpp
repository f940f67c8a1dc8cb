#include <doctest.h>

#include "atomip/encoding.hpp"
#include "support.hpp"

using namespace atomip;
using test::q;

namespace {

std::vector<std::string> labels(const HamiltonianTemplate& t) {
  std::vector<std::string> out;
  for (const auto& s : t.slots) out.push_back(slot_label(s));
  return out;
}

}  // namespace

TEST_CASE("level scheme maps values to levels and back") {
  const Problem p({{"a", -1, 1}, {"b", 3, 4}}, Polynomial({{q(1), {0}}}), {});
  const LevelScheme s = build_level_scheme(p);
  CHECK(s.dimension() == 5);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t k = 0; k < s.manifolds()[m].levels; ++k)
      CHECK(s.level_of(m, s.value_of(m, k)) == k);
  CHECK(s.global_index(1, 1) == 4);
  CHECK(s.value_of(0, 0) == -1);
}

TEST_CASE("P1 templates") {
  const Problem p = test::load("p1");
  const auto scheme = build_level_scheme(p);
  const auto t = build_templates(p, scheme);
  REQUIRE(t.size() == 2);
  CHECK(labels(t[0]) ==
        std::vector<std::string>{"Omega^1_01", "Omega^2_01", "Omega^2_02", "Omega~(1,0;2,1)"});
  CHECK(labels(t[1]) == std::vector<std::string>{"Omega^2_01", "Omega^2_02", "Omega^3_01",
                                                 "Omega^3_02", "Omega~(2,1;3,2)"});
}

TEST_CASE("singly-infeasible values") {
  const Problem p = test::load("p1");
  // 2*x1 + x2 <= 3: x1 = 2 needs x2 <= -1.
  CHECK(singly_infeasible_values(p.constraints()[0], 0, p.variables()) == std::set<Value>{2});
  CHECK(singly_infeasible_values(p.constraints()[0], 1, p.variables()).empty());
  const Problem p3 = test::load("p3");
  // 2*x4 + 3*x8 >= 5: x8 = 0 needs x4 >= 5/2.
  CHECK(singly_infeasible_values(p3.constraints()[1], 7, p3.variables()) == std::set<Value>{0});
}

TEST_CASE("singly-infeasible values match exhaustive completion checks") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = test::random_linear(rng, 3);
    const auto& c = p.constraints()[0];
    for (std::size_t v : c.lhs.variables()) {
      std::set<Value> expect;
      for (Value val = 0; val <= 2; ++val) {
        bool any = false;
        Assignment x(p.num_variables(), 0);
        // Enumerate the other variables.
        const std::size_t others = p.num_variables() - 1;
        std::size_t total = 1;
        for (std::size_t k = 0; k < others; ++k) total *= 3;
        for (std::size_t code = 0; code < total && !any; ++code) {
          std::size_t rem = code;
          for (std::size_t j = 0; j < p.num_variables(); ++j) {
            if (j == v) {
              x[j] = val;
            } else {
              x[j] = static_cast<Value>(rem % 3);
              rem /= 3;
            }
          }
          any = check_constraint(c, x);
        }
        if (!any) expect.insert(val);
      }
      CHECK(singly_infeasible_values(c, v, p.variables()) == expect);
    }
  }
}

TEST_CASE("templates never touch singly-infeasible levels") {
  for (const char* name : {"p1", "p2", "p3", "p4"}) {
    const Problem p = test::load(name);
    const auto scheme = build_level_scheme(p);
    for (const auto& t : build_templates(p, scheme)) {
      const auto& c = p.constraints()[t.constraint];
      for (const auto& s : t.slots) {
        const auto bad_a = singly_infeasible_values(c, s.manifold_a, p.variables());
        const auto bad_b = singly_infeasible_values(c, s.manifold_b, p.variables());
        CHECK(bad_a.count(scheme.value_of(s.manifold_a, s.level_a)) == 0);
        CHECK(bad_b.count(scheme.value_of(s.manifold_b, s.level_b)) == 0);
      }
    }
  }
}

TEST_CASE("querying a variable outside the constraint is an error") {
  const Problem p = test::load("p1");
  CHECK_THROWS(singly_infeasible_values(p.constraints()[1], 0, p.variables()));
}

TEST_CASE("single-variable constraint yields one internal slot") {
  const Problem p({{"x1", 0, 2}}, Polynomial({{q(1), {0}}}),
                  {{"c", Polynomial({{q(1), {0}}}), Sense::LessEqual, q(1)}});
  const auto scheme = build_level_scheme(p);
  CHECK(labels(build_constraint_template(p, 0, scheme)) == std::vector<std::string>{"Omega^1_01"});
}

TEST_CASE("star hub moves to the lowest allowed level") {
  const Problem p3 = test::load("p3");
  const auto scheme = build_level_scheme(p3);
  const auto t = build_constraint_template(p3, 1, scheme);
  CHECK(labels(t) == std::vector<std::string>{"Omega^4_01", "Omega^4_02", "Omega^8_12",
                                              "Omega~(4,2;8,2)"});
}

TEST_CASE("chain topology and explicit external couplings") {
  const Problem p = test::load("p1");
  const auto scheme = build_level_scheme(p);
  CouplingPolicy policy;
  policy.internal = InternalTopology::Chain;
  policy.external = ExternalRule::Explicit;
  policy.explicit_external[0] = {CouplingSlot::external(0, 1, 1, 2)};
  const auto t = build_constraint_template(p, 0, scheme, policy);
  CHECK(labels(t) == std::vector<std::string>{"Omega^1_01", "Omega^2_01", "Omega^2_12",
                                              "Omega~(1,1;2,2)"});
  // No entry for the second constraint: internal slots only.
  CHECK(build_constraint_template(p, 1, scheme, policy).slots.size() == 4);
}

TEST_CASE("a constraint no value can satisfy is rejected") {
  const Problem p({{"x", 0, 1}, {"y", 0, 1}}, Polynomial({{q(1), {0}}}),
                  {{"c", Polynomial({{q(1), {0}}, {q(1), {1}}}), Sense::GreaterEqual, q(5)}});
  CHECK_THROWS_AS(build_templates(p, build_level_scheme(p)), ConstraintUnsatisfiable);
}
