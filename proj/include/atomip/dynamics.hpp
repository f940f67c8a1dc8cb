#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "atomip/encoding.hpp"

namespace atomip {

// Units throughout: hbar = 1, time in microseconds, couplings in rad/us.

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using StateVector = Vector<std::complex<double>>;

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hermitian coupling Hamiltonian for one template. Real amplitudes give a
/// real symmetric matrix; complex amplitudes place `a` above and `conj(a)`
/// below the slot's diagonal pair.
template <typename Scalar>
Matrix<Scalar> assemble(const HamiltonianTemplate& tmpl, const LevelScheme& scheme,
                        const Eigen::Ref<const Vector<Scalar>>& amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != tmpl.slots.size())
    throw std::invalid_argument("amplitude count does not match slot count");
  const auto d = static_cast<Eigen::Index>(scheme.dimension());
  Matrix<Scalar> h = Matrix<Scalar>::Zero(d, d);
  for (std::size_t s = 0; s < tmpl.slots.size(); ++s) {
    const auto& slot = tmpl.slots[s];
    const auto row = static_cast<Eigen::Index>(scheme.global_index(slot.manifold_a, slot.level_a));
    const auto col = static_cast<Eigen::Index>(scheme.global_index(slot.manifold_b, slot.level_b));
    const Scalar a = amplitudes(static_cast<Eigen::Index>(s));
    h(row, col) += a;
    if constexpr (std::is_same_v<Scalar, std::complex<typename Eigen::NumTraits<Scalar>::Real>>)
      h(col, row) += std::conj(a);
    else
      h(col, row) += a;
  }
  return h;
}

namespace detail {

/// Indices of rows/columns holding a nonzero entry.
template <typename Scalar>
std::vector<Eigen::Index> active_levels(const Matrix<Scalar>& h) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (h.row(i).cwiseAbs().maxCoeff() != 0 || h.col(i).cwiseAbs().maxCoeff() != 0)
      out.push_back(i);
  return out;
}

/// Exact evolution under a constant Hamiltonian. Writes |psi(t)|^2 for the
/// sample times first_offset + k*dt (k < samples) into consecutive columns of
/// `populations`, then advances `psi` to time `duration`. Levels outside the
/// Hamiltonian's support are left untouched.
template <typename Scalar, typename PopulationBlock>
void evolve_segment(const Matrix<Scalar>& h, StateVector& psi, double duration,
                    double first_offset, double dt, Eigen::Index samples,
                    PopulationBlock&& populations) {
  using Complex = std::complex<double>;
  const auto active = active_levels(h);
  const Eigen::Index n = static_cast<Eigen::Index>(active.size());
  const Eigen::VectorXd base = psi.cwiseAbs2();

  for (Eigen::Index k = 0; k < samples; ++k) populations.col(k) = base;
  if (n == 0) return;

  Matrix<Scalar> h_active(n, n);
  StateVector psi_active(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    psi_active(i) = psi(active[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j)
      h_active(i, j) = h(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
  }
  if (!h_active.allFinite()) throw DynamicsError("non-finite Hamiltonian entry");

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(h_active);
  if (eig.info() != Eigen::Success) throw DynamicsError("eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const Matrix<Complex> v = eig.eigenvectors().template cast<Complex>();
  const StateVector coeff = v.adjoint() * psi_active;

  if (samples > 0) {
    Matrix<Complex> phased(n, samples);
    StateVector step(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      phased(j, 0) = coeff(j) * std::polar(1.0, -lambda(j) * first_offset);
      step(j) = std::polar(1.0, -lambda(j) * dt);
    }
    // Re-anchor the phase recurrence periodically to bound rounding drift.
    constexpr Eigen::Index kResync = 256;
    for (Eigen::Index k = 1; k < samples; ++k) {
      if (k % kResync == 0) {
        const double t = first_offset + static_cast<double>(k) * dt;
        for (Eigen::Index j = 0; j < n; ++j)
          phased(j, k) = coeff(j) * std::polar(1.0, -lambda(j) * t);
      } else {
        phased.col(k) = phased.col(k - 1).cwiseProduct(step);
      }
    }
    const Matrix<Complex> amps = v * phased;
    for (Eigen::Index i = 0; i < n; ++i)
      populations.row(active[static_cast<std::size_t>(i)]) = amps.row(i).cwiseAbs2();
  }

  StateVector final_phase(n);
  for (Eigen::Index j = 0; j < n; ++j)
    final_phase(j) = coeff(j) * std::polar(1.0, -lambda(j) * duration);
  const StateVector psi_end = v * final_phase;
  for (Eigen::Index i = 0; i < n; ++i) psi(active[static_cast<std::size_t>(i)]) = psi_end(i);
}

/// Exact exp(-i h t) applied to psi.
template <typename Scalar>
StateVector evolve_state(const Matrix<Scalar>& h, StateVector psi, double t) {
  Eigen::MatrixXd unused(psi.size(), 0);
  evolve_segment(h, psi, t, 0.0, 1.0, 0, unused);
  return psi;
}

}  // namespace detail

struct StateSample {
  double t = 0.0;
  StateVector state;
};

/// Samples exp(-i h t) * state at t = dt, 2 dt, ... up to and including tau.
/// When tau is not a multiple of dt the last sample sits at tau exactly.
template <typename Scalar>
std::vector<StateSample> propagate(const StateVector& state, const Matrix<Scalar>& h, double tau,
                                   double dt) {
  if (!(tau > 0.0) || !(dt > 0.0)) throw std::invalid_argument("tau and dt must be positive");
  if (!h.allFinite() || !state.allFinite()) throw DynamicsError("non-finite input");
  const double ratio = tau / dt;
  auto steps = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  std::vector<double> times;
  for (std::size_t k = 1; k <= steps; ++k) times.push_back(static_cast<double>(k) * dt);
  if (times.empty() || tau - times.back() > 1e-9 * dt) times.push_back(tau);
  else times.back() = tau;

  std::vector<StateSample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, detail::evolve_state(h, state, t)});
  return out;
}

/// Duration and per-slot amplitudes of one constraint Hamiltonian in one layer.
struct SegmentParams {
  double duration = 0.0;
  Eigen::VectorXd amplitudes;
};

/// segments[layer][constraint].
struct ProtocolParams {
  std::vector<std::vector<SegmentParams>> segments;

  std::size_t layers() const { return segments.size(); }
  double total_time() const;
};

struct Trajectory {
  double dt = 0.0;
  double total_time = 0.0;
  std::vector<double> times;      // t_k = k * dt, k = 0..N_T
  Eigen::MatrixXd populations;    // dimension x (N_T + 1)
  std::vector<double> boundaries;  // end time of every segment, in protocol order
  StateVector final_state;

  std::size_t samples() const { return times.size(); }
};

/// Amplitude 1 on the lowest level of `manifold`.
StateVector basis_state(const LevelScheme& scheme, std::size_t manifold, std::size_t level = 0);

/// Applies, for each layer and each constraint in order, that constraint's
/// Hamiltonian for its duration, sampling on the uniform grid k * dt.
Trajectory run_protocol(const LevelScheme& scheme, const std::vector<HamiltonianTemplate>& templates,
                        const ProtocolParams& params, double dt, const StateVector& initial);

}  // namespace atomip
