#include "atomip/dynamics.hpp"

namespace atomip {

double ProtocolParams::total_time() const {
  double t = 0.0;
  for (const auto& layer : segments)
    for (const auto& seg : layer) t += seg.duration;
  return t;
}

StateVector basis_state(const LevelScheme& scheme, std::size_t manifold, std::size_t level) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(scheme.dimension()));
  psi(static_cast<Eigen::Index>(scheme.global_index(manifold, level))) = 1.0;
  return psi;
}

Trajectory run_protocol(const LevelScheme& scheme, const std::vector<HamiltonianTemplate>& templates,
                        const ProtocolParams& params, double dt, const StateVector& initial) {
  const auto d = static_cast<Eigen::Index>(scheme.dimension());
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (initial.size() != d) throw std::invalid_argument("initial state has wrong dimension");
  for (const auto& layer : params.segments) {
    if (layer.size() != templates.size())
      throw std::invalid_argument("layer does not provide one segment per constraint");
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!(layer[i].duration > 0.0) || !std::isfinite(layer[i].duration))
        throw std::invalid_argument("segment duration must be positive and finite");
      if (static_cast<std::size_t>(layer[i].amplitudes.size()) != templates[i].slots.size())
        throw std::invalid_argument("amplitude count does not match slot count");
    }
  }

  Trajectory traj;
  traj.dt = dt;
  traj.total_time = params.total_time();
  const auto last = static_cast<Eigen::Index>(std::floor(traj.total_time / dt + 1e-9));
  traj.times.resize(static_cast<std::size_t>(last) + 1);
  for (Eigen::Index k = 0; k <= last; ++k)
    traj.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
  traj.populations.resize(d, last + 1);
  traj.populations.col(0) = initial.cwiseAbs2();

  StateVector psi = initial;
  double t0 = 0.0;
  Eigen::Index next = 1;
  for (const auto& layer : params.segments) {
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const double t1 = t0 + layer[i].duration;
      Eigen::Index count = 0;
      while (next + count <= last && static_cast<double>(next + count) * dt <= t1 + 1e-9 * dt)
        ++count;
      const Eigen::MatrixXd h = assemble<double>(templates[i], scheme, layer[i].amplitudes);
      detail::evolve_segment(h, psi, layer[i].duration, static_cast<double>(next) * dt - t0, dt,
                             count, traj.populations.middleCols(next, count));
      next += count;
      t0 = t1;
      traj.boundaries.push_back(t1);
    }
  }
  traj.final_state = psi;
  return traj;
}

}  // namespace atomip
