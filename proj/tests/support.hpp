#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "atomip/parser.hpp"
#include "atomip/problem.hpp"

namespace test {

inline std::string data_path(const std::string& name) {
  return std::string(ATOMIP_DATA_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline atomip::Problem load(const std::string& name) {
  return atomip::parse_problem(read_text(data_path(name + ".ip")));
}

inline atomip::Rational q(long n, long d = 1) { return atomip::make_rational(n, d); }

/// Independent exhaustive optimum: odometer over the box, exact arithmetic.
struct NaiveOptimum {
  bool feasible = false;
  atomip::Rational value;
  std::vector<atomip::Assignment> argmax;
};

inline NaiveOptimum naive_optimum(const atomip::Problem& p) {
  using namespace atomip;
  NaiveOptimum out;
  const auto& vars = p.variables();
  Assignment x;
  for (const auto& v : vars) x.push_back(v.lo);
  while (true) {
    bool ok = true;
    for (const auto& c : p.constraints()) {
      Rational lhs = 0;
      for (const auto& t : c.lhs.terms()) {
        Rational term = t.coefficient;
        for (auto f : t.factors) term *= Rational(static_cast<long>(x[f]));
        lhs += term;
      }
      ok = ok && (c.sense == Sense::LessEqual ? lhs <= c.rhs : lhs >= c.rhs);
    }
    if (ok) {
      Rational val = 0;
      for (const auto& t : p.cost().terms()) {
        Rational term = t.coefficient;
        for (auto f : t.factors) term *= Rational(static_cast<long>(x[f]));
        val += term;
      }
      if (!out.feasible || val > out.value) {
        out.feasible = true;
        out.value = val;
        out.argmax.clear();
      }
      if (val == out.value) out.argmax.push_back(x);
    }
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (x[i] < vars[i].hi) {
        ++x[i];
        break;
      }
      x[i] = vars[i].lo;
      if (i == 0) return out;
    }
    if (vars.empty()) return out;
  }
}

/// Random linear instance: up to `max_vars` variables on 0..2, 1..3 constraints,
/// integer coefficients in [-5, 5].
inline atomip::Problem random_linear(std::mt19937_64& rng, std::size_t max_vars = 4) {
  using namespace atomip;
  std::uniform_int_distribution<int> nv(1, static_cast<int>(max_vars));
  std::uniform_int_distribution<int> nc(1, 3);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rhs(-2, 8);
  std::uniform_int_distribution<int> coin(0, 3);
  const std::size_t n = static_cast<std::size_t>(nv(rng));
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) vars.push_back({"x" + std::to_string(i + 1), 0, 2});
  auto linear = [&]() {
    std::vector<Monomial> terms;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = coef(rng);
      if (a != 0) terms.push_back({Rational(a), {i}});
    }
    if (terms.empty()) terms.push_back({Rational(1), {0}});
    return Polynomial(std::move(terms));
  };
  Polynomial cost = linear();
  std::vector<Constraint> cons;
  const int m = nc(rng);
  for (int k = 0; k < m; ++k)
    cons.push_back({"c" + std::to_string(k + 1), linear(),
                    coin(rng) == 0 ? Sense::GreaterEqual : Sense::LessEqual, Rational(rhs(rng))});
  return Problem(std::move(vars), std::move(cost), std::move(cons));
}

}  // namespace test
