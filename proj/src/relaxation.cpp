#include "atomip/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atomip {

namespace {

// Dense tableau for  max c.y  s.t.  A y <= b,  y >= 0.
class Tableau {
 public:
  Tableau(std::vector<std::vector<Rational>> a, std::vector<Rational> b, std::vector<Rational> c)
      : rows_(a.size()), structural_(c.size()), cost_(std::move(c)) {
    std::size_t artificials = 0;
    for (const auto& bi : b)
      if (bi < 0) ++artificials;
    cols_ = structural_ + rows_ + artificials;
    first_artificial_ = structural_ + rows_;
    t_.assign(rows_, std::vector<Rational>(cols_ + 1));
    basis_.resize(rows_);

    std::size_t next_art = first_artificial_;
    for (std::size_t r = 0; r < rows_; ++r) {
      const bool flip = b[r] < 0;
      const int s = flip ? -1 : 1;
      for (std::size_t j = 0; j < structural_; ++j) t_[r][j] = s * a[r][j];
      t_[r][structural_ + r] = s;
      t_[r][cols_] = s * b[r];
      if (flip) {
        t_[r][next_art] = 1;
        basis_[r] = next_art++;
      } else {
        basis_[r] = structural_ + r;
      }
    }
  }

  LpStatus solve() {
    if (first_artificial_ < cols_) {
      std::vector<Rational> phase1(cols_);
      for (std::size_t j = first_artificial_; j < cols_; ++j) phase1[j] = -1;
      run(phase1, cols_);
      for (std::size_t r = 0; r < rows_; ++r)
        if (basis_[r] >= first_artificial_ && t_[r][cols_] != 0) return LpStatus::Infeasible;
      drive_out_artificials();
    }
    std::vector<Rational> phase2(cols_);
    std::copy(cost_.begin(), cost_.end(), phase2.begin());
    return run(phase2, first_artificial_) ? LpStatus::Optimal : LpStatus::Unbounded;
  }

  std::vector<Rational> structural_values() const {
    std::vector<Rational> y(structural_);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < structural_) y[basis_[r]] = t_[r][cols_];
    return y;
  }

 private:
  // Bland's rule: lowest-index improving column, lowest-index leaving basic
  // variable among ratio ties. Columns >= allowed never enter.
  bool run(const std::vector<Rational>& c, std::size_t allowed) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < allowed && enter == cols_; ++j) {
        if (is_basic(j)) continue;
        Rational reduced = c[j];
        for (std::size_t r = 0; r < rows_; ++r)
          if (c[basis_[r]] != 0 && t_[r][j] != 0) reduced -= c[basis_[r]] * t_[r][j];
        if (reduced > 0) enter = j;
      }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (t_[r][enter] <= 0) continue;
        Rational ratio = t_[r][cols_] / t_[r][enter];
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  bool is_basic(std::size_t j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rational p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row || t_[r][col] == 0) continue;
      const Rational f = t_[r][col];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (t_[row][j] != 0) t_[r][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_;) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      std::size_t col = first_artificial_;
      for (std::size_t j = 0; j < first_artificial_; ++j)
        if (t_[r][j] != 0 && !is_basic(j)) {
          col = j;
          break;
        }
      if (col < first_artificial_) {
        pivot(r, col);
        ++r;
      } else {
        // Redundant row.
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
      }
    }
  }

  std::size_t rows_;
  std::size_t structural_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<Rational> cost_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp_relaxation(const Problem& p, const BoundOverrides& overrides) {
  if (classify(p) != ProblemClass::Linear)
    throw Unsupported("LP relaxation requires a linear problem");

  const std::size_t m = p.num_variables();
  std::vector<Rational> lo(m), hi(m);
  for (std::size_t j = 0; j < m; ++j) {
    lo[j] = static_cast<long>(p.variables()[j].lo);
    hi[j] = static_cast<long>(p.variables()[j].hi);
    if (j < overrides.size()) {
      if (overrides[j].lo) lo[j] = *overrides[j].lo;
      if (overrides[j].hi) hi[j] = *overrides[j].hi;
    }
  }

  LpSolution result;
  for (std::size_t j = 0; j < m; ++j)
    if (lo[j] > hi[j]) return result;

  // Shift x = lo + y so that y >= 0.
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (const auto& c : p.constraints()) {
    std::vector<Rational> row(m);
    Rational rhs = c.rhs - c.lhs.constant();
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = c.lhs.linear_coefficient(j);
      rhs -= row[j] * lo[j];
    }
    if (c.sense == Sense::GreaterEqual) {
      for (auto& v : row) v = -v;
      rhs = -rhs;
    }
    a.push_back(std::move(row));
    b.push_back(rhs);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Rational> row(m);
    row[j] = 1;
    a.push_back(std::move(row));
    b.push_back(hi[j] - lo[j]);
  }

  std::vector<Rational> cost(m);
  Rational offset = p.cost().constant();
  for (std::size_t j = 0; j < m; ++j) {
    cost[j] = p.cost().linear_coefficient(j);
    offset += cost[j] * lo[j];
  }

  Tableau tableau(std::move(a), std::move(b), cost);
  result.status = tableau.solve();
  if (result.status != LpStatus::Optimal) return result;

  const auto y = tableau.structural_values();
  result.point.resize(m);
  result.value = offset;
  for (std::size_t j = 0; j < m; ++j) {
    result.point[j] = lo[j] + y[j];
    result.value += cost[j] * y[j];
  }
  return result;
}

namespace {

// Floating evaluation of a polynomial, used only to screen grid points.
double eval_double(const Polynomial& poly, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& t : poly.terms()) {
    double term = t.coefficient.get_d();
    for (auto f : t.factors) term *= x[f];
    sum += term;
  }
  return sum;
}

Rational eval_exact(const Polynomial& poly, std::span<const Rational> x) {
  Rational sum = 0;
  for (const auto& t : poly.terms()) {
    Rational term = t.coefficient;
    for (auto f : t.factors) term *= x[f];
    sum += term;
  }
  return sum;
}

bool feasible_exact(const Problem& p, std::span<const Rational> x) {
  for (const auto& c : p.constraints()) {
    const Rational lhs = eval_exact(c.lhs, x);
    if (c.sense == Sense::LessEqual ? lhs > c.rhs : lhs < c.rhs) return false;
  }
  return true;
}

constexpr double kScreenTolerance = 1e-9;

bool feasible_screen(const Problem& p, std::span<const double> x) {
  for (const auto& c : p.constraints()) {
    const double lhs = eval_double(c.lhs, x);
    const double rhs = c.rhs.get_d();
    const double tol = kScreenTolerance * (1.0 + std::abs(rhs));
    if (c.sense == Sense::LessEqual ? lhs > rhs + tol : lhs < rhs - tol) return false;
  }
  return true;
}

struct Axis {
  Rational start;
  Rational step;
  Rational end;
  std::size_t count;  // points start, start+step, ..., clipped at end; end always included
  Rational at(std::size_t k) const {
    Rational v = start + step * static_cast<unsigned long>(k);
    return v > end ? end : v;
  }
};

Axis make_axis(const Rational& start, const Rational& end, const Rational& step) {
  Axis ax{start, step, end, 1};
  if (end > start) {
    Rational span = (end - start) / step;
    mpz_class n = floor_of(span);
    ax.count = n.get_ui() + 1;
    if (start + step * Rational(n) < end) ++ax.count;
  }
  return ax;
}

// Scans the lattice lexicographically (first variable slowest) and updates the
// incumbent on strict improvement, so ties keep the lexicographically smallest point.
void scan(const Problem& p, const std::vector<Axis>& axes, GridSolution& best) {
  const std::size_t m = axes.size();
  std::vector<std::size_t> idx(m, 0);
  std::vector<Rational> xq(m);
  std::vector<double> xd(m);
  std::vector<std::vector<double>> axis_values(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < axes[j].count; ++k) axis_values[j].push_back(axes[j].at(k).get_d());

  double best_screen = best.feasible ? best.value.get_d() : -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t j = 0; j < m; ++j) xd[j] = axis_values[j][idx[j]];
    const double v = eval_double(p.cost(), xd);
    if (v >= best_screen - kScreenTolerance * (1.0 + std::abs(best_screen)) &&
        feasible_screen(p, xd)) {
      for (std::size_t j = 0; j < m; ++j) xq[j] = axes[j].at(idx[j]);
      if (feasible_exact(p, xq)) {
        Rational value = eval_exact(p.cost(), xq);
        bool better = !best.feasible || value > best.value ||
                      (value == best.value && xq < best.point);
        if (better) {
          best.feasible = true;
          best.value = value;
          best.point = xq;
          best_screen = value.get_d();
        }
      }
    }
    std::size_t j = m;
    while (j-- > 0) {
      if (++idx[j] < axes[j].count) break;
      idx[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
}

}  // namespace

GridSolution solve_relaxation_grid(const Problem& p, const GridConfig& config) {
  const std::size_t m = p.num_variables();
  if (m > config.max_dimension)
    throw CapExceeded("grid relaxation limited to " + std::to_string(config.max_dimension) +
                      " variables");
  if (config.initial_step <= 0) throw std::invalid_argument("grid step must be positive");

  GridSolution best;
  Rational step = config.initial_step;
  std::vector<Axis> axes(m);
  for (std::size_t j = 0; j < m; ++j)
    axes[j] = make_axis(Rational(static_cast<long>(p.variables()[j].lo)),
                        Rational(static_cast<long>(p.variables()[j].hi)), step);
  scan(p, axes, best);
  best.final_step = step;
  if (!best.feasible) return best;

  for (int level = 0; level < config.refinement_levels; ++level) {
    const Rational window = step;
    step /= 10;
    for (std::size_t j = 0; j < m; ++j) {
      const Rational lo(static_cast<long>(p.variables()[j].lo));
      const Rational hi(static_cast<long>(p.variables()[j].hi));
      Rational a = best.point[j] - window;
      Rational b = best.point[j] + window;
      if (a < lo) a = lo;
      if (b > hi) b = hi;
      axes[j] = make_axis(a, b, step);
    }
    scan(p, axes, best);
    best.final_step = step;
  }
  return best;
}

}  // namespace atomip
