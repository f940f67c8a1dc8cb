#include "atomip/problem.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace atomip {

namespace {

// Lexicographic on factors; the constant term sorts last.
bool term_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.empty() != b.empty()) return b.empty();
  return a < b;
}

struct TermOrder {
  bool operator()(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    return term_less(a, b);
  }
};

}  // namespace

Polynomial::Polynomial(std::vector<Monomial> terms) {
  std::map<std::vector<std::size_t>, Rational, TermOrder> merged;
  for (auto& t : terms) {
    std::sort(t.factors.begin(), t.factors.end());
    merged[t.factors] += t.coefficient;
  }
  terms_.reserve(merged.size());
  for (auto& [factors, coef] : merged) {
    if (coef != 0) terms_.push_back({coef, factors});
  }
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.degree());
  return d;
}

Rational Polynomial::constant() const {
  if (!terms_.empty() && terms_.back().factors.empty()) return terms_.back().coefficient;
  return 0;
}

Rational Polynomial::linear_coefficient(std::size_t var) const {
  for (const auto& t : terms_) {
    if (t.factors.size() == 1 && t.factors[0] == var) return t.coefficient;
  }
  return 0;
}

std::vector<std::size_t> Polynomial::variables() const {
  std::set<std::size_t> vars;
  for (const auto& t : terms_) vars.insert(t.factors.begin(), t.factors.end());
  return {vars.begin(), vars.end()};
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  std::vector<Monomial> all = terms_;
  all.insert(all.end(), rhs.terms_.begin(), rhs.terms_.end());
  return Polynomial(std::move(all));
}

Polynomial Polynomial::operator*(const Rational& k) const {
  std::vector<Monomial> scaled = terms_;
  for (auto& t : scaled) t.coefficient *= k;
  return Polynomial(std::move(scaled));
}

bool Polynomial::operator==(const Polynomial& rhs) const {
  if (terms_.size() != rhs.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].factors != rhs.terms_[i].factors ||
        terms_[i].coefficient != rhs.terms_[i].coefficient)
      return false;
  }
  return true;
}

Problem::Problem(std::vector<Variable> variables, Polynomial cost,
                 std::vector<Constraint> constraints)
    : variables_(std::move(variables)),
      cost_(std::move(cost)),
      constraints_(std::move(constraints)) {
  std::unordered_set<std::string> names;
  for (const auto& v : variables_) {
    if (!names.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name '" + v.name + "'");
    if (v.lo > v.hi) throw std::invalid_argument("empty domain for variable '" + v.name + "'");
  }
  auto check_indices = [&](const Polynomial& poly, const std::string& where) {
    for (const auto& t : poly.terms())
      for (auto f : t.factors)
        if (f >= variables_.size())
          throw std::invalid_argument("undeclared variable index in " + where);
  };
  check_indices(cost_, "cost");
  for (const auto& c : constraints_) {
    if (c.lhs.empty())
      throw std::invalid_argument("constraint '" + c.name + "' has an empty left-hand side");
    check_indices(c.lhs, "constraint '" + c.name + "'");
  }
}

std::optional<std::size_t> Problem::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

Rational evaluate_polynomial(const Polynomial& poly, std::span<const Value> x) {
  Rational sum = 0;
  Rational term;
  for (const auto& t : poly.terms()) {
    term = t.coefficient;
    for (auto f : t.factors) {
      if (f >= x.size())
        throw EvaluationError("variable index " + std::to_string(f) + " is not assigned");
      term *= static_cast<long>(x[f]);
    }
    sum += term;
  }
  return sum;
}

bool check_constraint(const Constraint& c, std::span<const Value> x) {
  const Rational lhs = evaluate_polynomial(c.lhs, x);
  return c.sense == Sense::LessEqual ? lhs <= c.rhs : lhs >= c.rhs;
}

bool is_feasible(const Problem& p, std::span<const Value> x) {
  return std::all_of(p.constraints().begin(), p.constraints().end(),
                     [&](const Constraint& c) { return check_constraint(c, x); });
}

std::uint64_t box_size(std::span<const Variable> vars) {
  std::uint64_t total = 1;
  for (const auto& v : vars) {
    const auto n = static_cast<std::uint64_t>(v.domain_size());
    if (n != 0 && total > std::numeric_limits<std::uint64_t>::max() / n)
      return std::numeric_limits<std::uint64_t>::max();
    total *= n;
  }
  return total;
}

BruteForceResult brute_force_optimum(const Problem& p, std::uint64_t cap) {
  const auto& vars = p.variables();
  const std::uint64_t total = box_size(vars);
  if (total > cap)
    throw CapExceeded("enumeration of " + std::to_string(total) + " assignments exceeds cap " +
                      std::to_string(cap));

  BruteForceResult result;
  Assignment x(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) x[i] = vars[i].lo;

  for (std::uint64_t n = 0; n < total; ++n) {
    ++result.enumerated;
    if (is_feasible(p, x)) {
      Rational value = evaluate_polynomial(p.cost(), x);
      if (!result.feasible || value > result.value) {
        result.feasible = true;
        result.value = value;
        result.argmax.clear();
        result.argmax.push_back(x);
      } else if (value == result.value) {
        result.argmax.push_back(x);
      }
    }
    // Odometer increment, last variable fastest.
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (x[i] < vars[i].hi) {
        ++x[i];
        break;
      }
      x[i] = vars[i].lo;
    }
  }
  return result;
}

ProblemClass classify(const Problem& p) {
  if (!p.cost().is_linear()) return ProblemClass::Nonlinear;
  for (const auto& c : p.constraints())
    if (!c.lhs.is_linear()) return ProblemClass::Nonlinear;
  return ProblemClass::Linear;
}

double metric_b1(const Rational& v_int, const Rational& v_cont) {
  const Rational gap = abs(v_int - v_cont);
  const Rational floor_value = make_rational(1, 1000);
  const Rational scale = abs(v_int) > floor_value ? Rational(abs(v_int)) : floor_value;
  return to_double(Rational(gap / scale * 100));
}

double metric_b2(const Problem& p) {
  if (p.num_variables() == 0) return 0.0;
  std::set<std::size_t> nonlinear;
  auto scan = [&](const Polynomial& poly) {
    for (const auto& t : poly.terms())
      if (t.degree() >= 2) nonlinear.insert(t.factors.begin(), t.factors.end());
  };
  scan(p.cost());
  for (const auto& c : p.constraints()) scan(c.lhs);
  return 100.0 * static_cast<double>(nonlinear.size()) / static_cast<double>(p.num_variables());
}

std::size_t count_binary(const Problem& p) {
  return static_cast<std::size_t>(std::count_if(
      p.variables().begin(), p.variables().end(),
      [](const Variable& v) { return v.lo == 0 && v.hi == 1; }));
}

double metric_b3(const Problem& p) {
  if (p.num_variables() == 0) return 0.0;
  // n_int counts the non-binary integer variables, so n_int + n_bin = n_tot.
  const std::size_t n_bin = count_binary(p);
  const std::size_t discrete = (p.num_variables() - n_bin) + n_bin;
  return 100.0 * static_cast<double>(discrete) / static_cast<double>(p.num_variables());
}

}  // namespace atomip
