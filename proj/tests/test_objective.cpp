#include <doctest.h>

#include "atomip/objective.hpp"
#include "support.hpp"

using namespace atomip;
using test::q;

namespace {

DecodedSeries series_of(const Problem& p, const std::vector<Assignment>& xs) {
  DecodedSeries s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    s.times.push_back(static_cast<double>(k));
    s.assignments.push_back(xs[k]);
    s.feasible.push_back(is_feasible(p, xs[k]));
    s.cost.push_back(to_double(evaluate_polynomial(p.cost(), xs[k])));
  }
  return s;
}

}  // namespace

TEST_CASE("decode picks the most populated level, lowest value on ties") {
  const Problem p({{"a", 0, 2}, {"b", -1, 0}}, Polynomial({{q(1), {0}}}), {});
  const auto scheme = build_level_scheme(p);
  Eigen::VectorXd pop(5);
  pop << 0.1, 0.5, 0.2, 0.1, 0.1;
  CHECK(decode(pop, scheme) == Assignment{1, -1});
  pop << 0.3, 0.3, 0.3, 0.0, 1.0;
  CHECK(decode(pop, scheme) == Assignment{0, 0});
  CHECK(decode(pop * 7.5, scheme) == decode(pop, scheme));
  CHECK_THROWS_AS(decode(Eigen::VectorXd::Zero(4), scheme), std::invalid_argument);
}

TEST_CASE("feasible set") {
  const Problem p = test::load("p1");
  CHECK(feasible_set(series_of(p, {{1, 1, 1}, {1, 1, 1}}), p.constraints()) ==
        std::vector<std::size_t>{0, 1});
  CHECK(feasible_set(series_of(p, {{2, 2, 2}, {0, 2, 2}}), p.constraints()).empty());
  CHECK(feasible_set(series_of(p, {{2, 2, 2}, {2, 2, 2}, {2, 2, 2}, {0, 0, 0}}), p.constraints()) ==
        std::vector<std::size_t>{3});
}

TEST_CASE("objective hand cases") {
  const Problem p = test::load("p1");
  SUBCASE("all feasible") {
    const auto r = objective_value(series_of(p, {{1, 1, 1}, {0, 0, 0}, {1, 0, 0}}), p);
    CHECK(r.value == 0.0);
    CHECK(*r.best_cost == 6);
    CHECK(r.first_attainment == 0.0);
  }
  SUBCASE("nothing feasible, positive cost") {
    CHECK(objective_value(series_of(p, {{2, 2, 2}, {0, 2, 2}}), p).value == 2.0);
  }
  SUBCASE("two samples of cost 6, one feasible") {
    // (1,1,1) is feasible with cost 6; (2,0,0) is infeasible with cost 6.
    const auto r = objective_value(series_of(p, {{2, 0, 0}, {1, 1, 1}}), p);
    CHECK(r.value == 1.0);
    CHECK(r.first_attainment == 1.0);
  }
  SUBCASE("all feasible with zero total cost") {
    CHECK(objective_value(series_of(p, {{0, 0, 0}, {0, 0, 0}}), p).value == 0.0);
  }
  SUBCASE("zero total cost with an infeasible sample") {
    CHECK(multi_objective({true, false}, {0.0, 0.0}) == 1.5);
  }
}

TEST_CASE("O = 0 exactly when every sample is feasible") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> bit(0, 3);
  std::uniform_real_distribution<double> cost(-2.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<bool> f(n);
    std::vector<double> c(n);
    bool all = true;
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = bit(rng) != 0;
      c[k] = cost(rng);
      all = all && f[k];
    }
    const double o = multi_objective(f, c);
    CHECK(o >= 0.0);
    CHECK(o <= 2.0);
    CHECK((o == 0.0) == all);
  }
}

TEST_CASE("O does not increase when an infeasible sample with positive cost turns feasible") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> cost(0.1, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<bool> f(n);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = rng() % 2;
      c[k] = cost(rng);
    }
    std::size_t k = rng() % n;
    if (f[k]) continue;
    const double before = multi_objective(f, c);
    f[k] = true;
    CHECK(multi_objective(f, c) <= before + 1e-15);
  }
}

TEST_CASE("oracle memoizes exact feasibility") {
  const Problem p = test::load("p4");
  AssignmentOracle oracle(p);
  const auto& e = oracle.lookup({1, 0, 0});
  CHECK(e.feasible);
  CHECK(e.cost == 8.0);
  CHECK_FALSE(oracle.lookup({2, 0, 0}).feasible);
  CHECK(&oracle.lookup({1, 0, 0}) == &e);
}
