#include "atomip/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace atomip {

namespace {

class CountedObjective {
 public:
  CountedObjective(const ObjectiveFunction& f, std::size_t budget) : f_(f), budget_(budget) {}

  bool exhausted() const { return count_ >= budget_; }
  std::size_t count() const { return count_; }

  double operator()(const Eigen::VectorXd& x) {
    ++count_;
    const double v = f_(x);
    if (!std::isfinite(v)) throw NonFiniteObjective("objective returned a non-finite value");
    return v;
  }

 private:
  const ObjectiveFunction& f_;
  std::size_t budget_;
  std::size_t count_ = 0;
};

}  // namespace

MinimizeResult nelder_mead(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Box& box,
                           const NelderMeadConfig& config) {
  const Eigen::Index n = x0.size();
  if (!x0.allFinite()) throw std::invalid_argument("non-finite starting point");
  MinimizeResult res;
  res.x = box.project(x0);
  res.value = std::numeric_limits<double>::infinity();
  CountedObjective eval(f, config.max_evaluations);
  if (eval.exhausted()) return res;

  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(res.x);
  values.push_back(eval(res.x));
  for (Eigen::Index i = 0; i < n && !eval.exhausted(); ++i) {
    Eigen::VectorXd v = res.x;
    const double range = box.upper(i) - box.lower(i);
    const double step = config.initial_step * (range > 0 ? range : 1.0);
    v(i) = v(i) + step <= box.upper(i) ? v(i) + step : v(i) - step;
    v = box.project(v);
    simplex.push_back(v);
    values.push_back(eval(v));
  }

  auto finish = [&]() {
    const auto best = std::min_element(values.begin(), values.end()) - values.begin();
    res.x = simplex[static_cast<std::size_t>(best)];
    res.value = values[static_cast<std::size_t>(best)];
    res.evaluations = eval.count();
    return res;
  };
  if (simplex.size() < static_cast<std::size_t>(n) + 1) return finish();

  std::vector<std::size_t> order(simplex.size());
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<Eigen::VectorXd> s2;
      std::vector<double> v2;
      for (auto i : order) {
        s2.push_back(std::move(simplex[i]));
        v2.push_back(values[i]);
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    if (diameter < config.tolerance) {
      res.converged = true;
      return finish();
    }
    if (eval.exhausted()) return finish();
    ++res.iterations;

    const std::size_t worst = simplex.size() - 1;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(worst);

    const Eigen::VectorXd xr =
        box.project(centroid + config.reflection * (centroid - simplex[worst]));
    const double fr = eval(xr);

    if (fr < values[0]) {
      if (eval.exhausted()) {
        simplex[worst] = xr;
        values[worst] = fr;
        continue;
      }
      const Eigen::VectorXd xe = box.project(centroid + config.expansion * (xr - centroid));
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[worst - 1]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    if (eval.exhausted()) continue;

    bool contracted = false;
    if (fr < values[worst]) {
      const Eigen::VectorXd xc = box.project(centroid + config.contraction * (xr - centroid));
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[worst] = xc;
        values[worst] = fc;
        contracted = true;
      }
    } else {
      const Eigen::VectorXd xc =
          box.project(centroid + config.contraction * (simplex[worst] - centroid));
      const double fc = eval(xc);
      if (fc < values[worst]) {
        simplex[worst] = xc;
        values[worst] = fc;
        contracted = true;
      }
    }
    if (contracted) continue;

    for (std::size_t i = 1; i < simplex.size() && !eval.exhausted(); ++i) {
      simplex[i] = box.project(simplex[0] + config.shrink * (simplex[i] - simplex[0]));
      values[i] = eval(simplex[i]);
    }
  }
}

Eigen::VectorXd fd_gradient(const ObjectiveFunction& f, const Eigen::VectorXd& x, const Box& box,
                            double relative_step, std::size_t* evaluations) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double range = box.upper(i) - box.lower(i);
    const double h = relative_step * (range > 0 ? range : 1.0);
    Eigen::VectorXd plus = x, minus = x;
    plus(i) = std::min(x(i) + h, box.upper(i));
    minus(i) = std::max(x(i) - h, box.lower(i));
    const double width = plus(i) - minus(i);
    if (width <= 0) continue;
    const double fp = f(plus);
    const double fm = f(minus);
    if (evaluations) *evaluations += 2;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NonFiniteObjective("objective returned a non-finite value");
    g(i) = (fp - fm) / width;
  }
  return g;
}

MinimizeResult bfgs_fd(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Box& box,
                       const BfgsConfig& config) {
  const Eigen::Index n = x0.size();
  if (!x0.allFinite()) throw std::invalid_argument("non-finite starting point");
  MinimizeResult res;
  res.x = box.project(x0);
  res.value = std::numeric_limits<double>::infinity();
  CountedObjective eval(f, config.max_evaluations);
  if (eval.exhausted()) return res;

  auto gradient = [&](const Eigen::VectorXd& x) {
    std::size_t used = 0;
    ObjectiveFunction counted = [&](const Eigen::VectorXd& y) { return eval(y); };
    Eigen::VectorXd g = fd_gradient(counted, x, box, config.fd_step, &used);
    return g;
  };

  Eigen::VectorXd x = res.x;
  double fx = eval(x);
  res.value = fx;
  if (eval.count() + 2 * static_cast<std::size_t>(n) > config.max_evaluations) {
    res.evaluations = eval.count();
    return res;
  }
  Eigen::VectorXd g = gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    if (g.norm() < config.gradient_tolerance) {
      res.converged = true;
      break;
    }
    res.iterations = it + 1;
    Eigen::VectorXd p = -hinv * g;
    if (g.dot(p) >= 0) {
      hinv.setIdentity();
      p = -g;
    }

    bool accepted = false;
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = fx;
    for (std::size_t k = 0; k < config.max_backtracks && !eval.exhausted(); ++k) {
      x_new = box.project(x + alpha * p);
      const double decrease = g.dot(x_new - x);
      if ((x_new - x).cwiseAbs().maxCoeff() == 0.0) break;
      f_new = eval(x_new);
      if (f_new <= fx + config.armijo * std::min(0.0, decrease) && f_new <= fx) {
        accepted = true;
        break;
      }
      alpha *= config.backtrack;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    x = x_new;
    fx = f_new;
    if (eval.count() + 2 * static_cast<std::size_t>(n) > config.max_evaluations) break;
    const Eigen::VectorXd g_new = gradient(x);
    const Eigen::VectorXd y = g_new - g;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
  }
  res.x = x;
  res.value = fx;
  res.evaluations = eval.count();
  return res;
}

}  // namespace atomip
