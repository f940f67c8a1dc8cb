#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace atomip {

using ObjectiveFunction = std::function<double(const Eigen::VectorXd&)>;

class NonFiniteObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box unit(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)};
  }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;  // +inf when nothing was evaluated
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

struct NelderMeadConfig {
  std::size_t max_evaluations = 2000;
  double tolerance = 1e-6;     // simplex diameter, infinity norm
  double initial_step = 0.1;   // fraction of each coordinate's range
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

/// Downhill simplex. Trial points are projected onto the box.
MinimizeResult nelder_mead(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Box& box,
                           const NelderMeadConfig& config = {});

struct BfgsConfig {
  std::size_t max_iterations = 100;
  std::size_t max_evaluations = 2000;
  double gradient_tolerance = 1e-8;
  double fd_step = 1e-3;  // fraction of each coordinate's range
  double armijo = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 30;
};

/// Central finite-difference gradient; steps are clipped at the box faces.
Eigen::VectorXd fd_gradient(const ObjectiveFunction& f, const Eigen::VectorXd& x, const Box& box,
                            double relative_step, std::size_t* evaluations = nullptr);

/// Quasi-Newton (inverse-Hessian BFGS) with finite-difference gradients, a
/// projected backtracking line search, and monotone acceptance.
MinimizeResult bfgs_fd(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Box& box,
                       const BfgsConfig& config = {});

}  // namespace atomip
