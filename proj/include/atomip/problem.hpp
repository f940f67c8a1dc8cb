#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomip/rational.hpp"

namespace atomip {

using Value = std::int64_t;
using Assignment = std::vector<Value>;

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coefficient times a product of variables. Repeated indices encode powers;
/// an empty factor list is a constant.
struct Monomial {
  Rational coefficient;
  std::vector<std::size_t> factors;

  std::size_t degree() const { return factors.size(); }
};

/// Sum of monomials, kept in canonical form: factors sorted, like terms merged,
/// zero terms dropped, terms ordered lexicographically with the constant last.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Monomial> terms);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t degree() const;
  bool is_linear() const { return degree() <= 1; }

  /// Constant term (zero when absent).
  Rational constant() const;
  /// Coefficient of the degree-1 monomial in `var` (zero when absent).
  Rational linear_coefficient(std::size_t var) const;
  /// Sorted, de-duplicated variable indices.
  std::vector<std::size_t> variables() const;

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator*(const Rational& k) const;
  bool operator==(const Polynomial& rhs) const;

 private:
  std::vector<Monomial> terms_;
};

enum class Sense { LessEqual, GreaterEqual };

struct Constraint {
  std::string name;
  Polynomial lhs;
  Sense sense = Sense::LessEqual;
  Rational rhs;

  bool operator==(const Constraint& o) const {
    return name == o.name && lhs == o.lhs && sense == o.sense && rhs == o.rhs;
  }
};

struct Variable {
  std::string name;
  Value lo = 0;
  Value hi = 0;

  std::size_t domain_size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool operator==(const Variable&) const = default;
};

/// Integer program, always a maximization.
class Problem {
 public:
  Problem(std::vector<Variable> variables, Polynomial cost, std::vector<Constraint> constraints);

  const std::vector<Variable>& variables() const { return variables_; }
  const Polynomial& cost() const { return cost_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t num_variables() const { return variables_.size(); }

  std::optional<std::size_t> find_variable(std::string_view name) const;

  bool operator==(const Problem&) const = default;

 private:
  std::vector<Variable> variables_;
  Polynomial cost_;
  std::vector<Constraint> constraints_;
};

Rational evaluate_polynomial(const Polynomial& poly, std::span<const Value> x);
bool check_constraint(const Constraint& c, std::span<const Value> x);
bool is_feasible(const Problem& p, std::span<const Value> x);

struct BruteForceResult {
  bool feasible = false;
  Rational value;                  // meaningful only when feasible
  std::vector<Assignment> argmax;  // in enumeration order (last variable fastest)
  std::uint64_t enumerated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Number of points in the integer box, saturating at UINT64_MAX.
std::uint64_t box_size(std::span<const Variable> vars);

/// Exhaustive search over every assignment in the box. Throws CapExceeded
/// when the box holds more than `cap` points.
BruteForceResult brute_force_optimum(const Problem& p,
                                     std::uint64_t cap = kDefaultEnumerationCap);

enum class ProblemClass { Linear, Nonlinear };
ProblemClass classify(const Problem& p);

struct Metrics {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  Rational v_int;
  Rational v_cont;
  std::size_t n_tot = 0;
  std::size_t n_int = 0;
  std::size_t n_bin = 0;
};

/// Relative continuous relaxation gap, in percent.
double metric_b1(const Rational& v_int, const Rational& v_cont);
/// Share of variables appearing in a monomial of degree >= 2, in percent.
double metric_b2(const Problem& p);
/// Discrete density, in percent. Every variable here is integer.
double metric_b3(const Problem& p);
std::size_t count_binary(const Problem& p);

}  // namespace atomip
