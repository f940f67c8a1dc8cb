#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomip/dynamics.hpp"
#include "atomip/encoding.hpp"
#include "atomip/objective.hpp"
#include "atomip/optimize.hpp"
#include "atomip/problem.hpp"

namespace atomip {

enum class InitialState {
  /// Lowest level of the first manifold of every coupled component, equal
  /// weights. Identical to FirstManifold when the coupling graph is connected.
  Auto,
  /// Amplitude 1 on level 0 of manifold 1.
  FirstManifold,
};

struct ControlConfig {
  std::uint64_t seed = 0;
  std::size_t restarts = 20;
  std::size_t layers = 3;
  std::size_t budget = 2000;   // objective evaluations per restart
  double nm_fraction = 0.75;   // share of the budget granted to Nelder-Mead
  double dt = 0.01;            // us
  double amplitude_min = 0.0;  // rad/us
  double amplitude_max = 20.0;
  double tau_min = 0.1;  // us
  double tau_max = 10.0;
  double max_total_time = 40.0;  // us; 0 disables the cap
  bool tied_layers = false;
  InitialState initial = InitialState::Auto;
  std::size_t threads = 1;
  double nm_tolerance = 1e-6;
  double nm_initial_step = 0.1;
  double fd_step = 1e-3;
  double gradient_tolerance = 1e-8;
};

/// Maps a point of the unit cube onto protocol parameters. Per (layer,
/// constraint) the layout is [duration, slot amplitudes...]; with tied layers
/// only the first layer is stored and reused.
class ProtocolLayout {
 public:
  ProtocolLayout(const std::vector<HamiltonianTemplate>& templates, const ControlConfig& config);

  Eigen::Index size() const { return size_; }
  ProtocolParams params(const Eigen::VectorXd& unit) const;

 private:
  std::vector<std::size_t> slot_counts_;
  std::size_t layers_;
  bool tied_;
  double amp_min_, amp_max_, tau_min_, tau_max_, max_total_;
  Eigen::Index size_ = 0;
};

StateVector initial_state(const LevelScheme& scheme, const std::vector<HamiltonianTemplate>& templates,
                          InitialState kind);

struct FeasibleHit {
  double cost = 0.0;
  Assignment assignment;
  double first_time = 0.0;
};

/// Objective O of one protocol on the optimizer's sampling grid, plus the best
/// feasible decoded assignment seen along the way.
class ProtocolEvaluator {
 public:
  ProtocolEvaluator(const Problem& problem, const LevelScheme& scheme,
                    const std::vector<HamiltonianTemplate>& templates, const ControlConfig& config);

  struct Outcome {
    double objective = 2.0;
    std::optional<FeasibleHit> best;
  };

  Outcome evaluate(const Eigen::VectorXd& unit);
  const ProtocolLayout& layout() const { return layout_; }
  const StateVector& initial() const { return initial_; }
  Trajectory simulate(const Eigen::VectorXd& unit) const;

 private:
  const Problem& problem_;
  const LevelScheme& scheme_;
  const std::vector<HamiltonianTemplate>& templates_;
  ControlConfig config_;
  ProtocolLayout layout_;
  StateVector initial_;
  AssignmentOracle oracle_;
};

struct RestartTrace {
  std::size_t index = 0;
  double initial_objective = 0.0;
  double nelder_mead_objective = 0.0;
  double final_objective = 0.0;
  double best_so_far = 0.0;  // best O over restarts 0..index
  std::size_t nelder_mead_evaluations = 0;
  std::size_t bfgs_evaluations = 0;
  bool bfgs_line_search_failed = false;
  std::optional<double> best_feasible_cost;
};

struct BestFeasible {
  Rational cost;
  Assignment assignment;
  double first_time = 0.0;
  std::size_t restart = 0;
  Eigen::VectorXd unit;
};

struct OptimizationReport {
  std::uint64_t seed = 0;
  Eigen::VectorXd best_unit;
  ProtocolParams best_params;
  double best_objective = 2.0;
  std::size_t best_restart = 0;
  std::optional<BestFeasible> best_feasible;
  std::size_t evaluations = 0;
  std::vector<RestartTrace> restarts;
};

class OptimizerAbort : public std::runtime_error {
 public:
  OptimizerAbort(std::size_t restart, const std::string& what)
      : std::runtime_error("restart " + std::to_string(restart) + ": " + what), restart_(restart) {}
  std::size_t restart() const { return restart_; }

 private:
  std::size_t restart_;
};

/// Multi-start Nelder-Mead followed by finite-difference BFGS polish on the
/// unit-cube parametrization. Deterministic for a fixed seed, independent of
/// `threads`.
OptimizationReport optimize_protocol(const Problem& problem, const LevelScheme& scheme,
                                     const std::vector<HamiltonianTemplate>& templates,
                                     const ControlConfig& config);

}  // namespace atomip
