#include <doctest.h>

#include <algorithm>
#include <optional>

#include "atomip/relaxation.hpp"
#include "support.hpp"

using namespace atomip;
using test::q;

namespace {

// Reference LP optimum by vertex enumeration: every vertex of the polytope is
// the unique solution of n linearly independent tight rows.
std::optional<Rational> vertex_optimum(const Problem& p) {
  const std::size_t n = p.num_variables();
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  std::vector<bool> is_le;
  for (const auto& c : p.constraints()) {
    std::vector<Rational> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = c.lhs.linear_coefficient(j);
    rows.push_back(r);
    rhs.push_back(c.rhs);
    is_le.push_back(c.sense == Sense::LessEqual);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> r(n);
    r[j] = 1;
    rows.push_back(r);
    rhs.push_back(Rational(static_cast<long>(p.variables()[j].hi)));
    is_le.push_back(true);
    rows.push_back(r);
    rhs.push_back(Rational(static_cast<long>(p.variables()[j].lo)));
    is_le.push_back(false);
  }
  const std::size_t m = rows.size();
  std::optional<Rational> best;
  std::vector<std::size_t> pick(n);
  // Iterate over all n-subsets of rows.
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n), true);
  do {
    std::vector<std::vector<Rational>> a;
    for (std::size_t i = 0; i < m; ++i)
      if (mask[i]) {
        auto row = rows[i];
        row.push_back(rhs[i]);
        a.push_back(row);
      }
    // Gauss-Jordan.
    bool singular = false;
    for (std::size_t col = 0; col < n && !singular; ++col) {
      std::size_t piv = col;
      while (piv < n && a[piv][col] == 0) ++piv;
      if (piv == n) {
        singular = true;
        break;
      }
      std::swap(a[piv], a[col]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const Rational f = a[r][col] / a[col][col];
        for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
      }
    }
    if (singular) continue;
    std::vector<Rational> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = a[j][n] / a[j][j];
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      Rational lhs = 0;
      for (std::size_t j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
      ok = is_le[i] ? lhs <= rhs[i] : lhs >= rhs[i];
    }
    if (!ok) continue;
    Rational val = p.cost().constant();
    for (std::size_t j = 0; j < n; ++j) val += p.cost().linear_coefficient(j) * x[j];
    if (!best || val > *best) best = val;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

Rational lp_cost(const Problem& p, const std::vector<Rational>& x) {
  Rational v = p.cost().constant();
  for (std::size_t j = 0; j < x.size(); ++j) v += p.cost().linear_coefficient(j) * x[j];
  return v;
}

bool lp_feasible(const Problem& p, const std::vector<Rational>& x) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < p.variables()[j].lo || x[j] > p.variables()[j].hi) return false;
  for (const auto& c : p.constraints()) {
    Rational lhs = 0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.lhs.linear_coefficient(j) * x[j];
    if (c.sense == Sense::LessEqual ? lhs > c.rhs : lhs < c.rhs) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("simplex on the reference problems") {
  SUBCASE("P1") {
    const auto s = solve_lp_relaxation(test::load("p1"));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == q(13, 2));
    CHECK(s.point == std::vector<Rational>{q(3, 2), q(0), q(2)});
  }
  SUBCASE("P4") {
    const auto s = solve_lp_relaxation(test::load("p4"));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == q(31, 2));
  }
  SUBCASE("P3 root is integral") {
    const auto s = solve_lp_relaxation(test::load("p3"));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == 25);
  }
  SUBCASE("nonlinear input is rejected") {
    CHECK_THROWS_AS(solve_lp_relaxation(test::load("p2")), Unsupported);
  }
}

TEST_CASE("simplex agrees with vertex enumeration on random instances") {
  std::mt19937_64 rng(21);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Problem p = test::random_linear(rng);
    const auto s = solve_lp_relaxation(p);
    const auto ref = vertex_optimum(p);
    REQUIRE(ref.has_value() == (s.status == LpStatus::Optimal));
    if (!ref) continue;
    ++optimal;
    CHECK(s.value == *ref);
    CHECK(lp_feasible(p, s.point));
    CHECK(lp_cost(p, s.point) == s.value);
  }
  CHECK(optimal > 50);
}

TEST_CASE("tightening bounds never raises the relaxation value") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = test::random_linear(rng);
    const auto root = solve_lp_relaxation(p);
    if (root.status != LpStatus::Optimal) continue;
    BoundOverrides o(p.num_variables());
    o[0].hi = q(1);
    const auto child = solve_lp_relaxation(p, o);
    if (child.status == LpStatus::Optimal) {
      CHECK(child.value <= root.value);
      CHECK(child.point[0] <= 1);
    }
  }
}

TEST_CASE("grid relaxation") {
  SUBCASE("P2 reaches the integer value") {
    const auto g = solve_relaxation_grid(test::load("p2"));
    REQUIRE(g.feasible);
    CHECK(g.value >= 4);
  }
  SUBCASE("grid is a lower bound on the exact LP, and close to it") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      const Problem p = test::random_linear(rng, 3);
      const auto lp = solve_lp_relaxation(p);
      const auto g = solve_relaxation_grid(p);
      if (lp.status != LpStatus::Optimal) {
        CHECK_FALSE(g.feasible);
        continue;
      }
      if (!g.feasible) continue;  // feasible region thinner than the grid
      CHECK(g.value <= lp.value);
      CHECK(lp_feasible(p, g.point));
      CHECK(to_double(lp.value - g.value) < 0.5);
    }
  }
}
