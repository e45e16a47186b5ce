#pragma once

// Two-mode spin dynamics of the binomial Fock superposition whose components
// each follow their instantaneous Gutzwiller ground state along the ramp.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/spin.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

struct FockWindow {
  int lo = 0, hi = 0;      // inclusive range of Na
  double tail_mass = 0.0;  // binomial weight outside the window
};

/// |Na - N/2| <= max(min_half_width, 5 sqrt(N)), clipped to [0, N].
FockWindow fock_window(int N, double min_half_width = 12.0);

struct SpinAmplitudes {
  int N = 0;
  FockWindow window;
  Eigen::VectorXd phase;  // radians in [0, 2 pi), one per Na in the window
  std::vector<std::complex<double>> d;
};

/// Binomial amplitudes with phases phase(Na) (radians, any range).
SpinAmplitudes make_amplitudes(int N, const FockWindow &window,
                               const Eigen::VectorXd &phase);

SpinMoments<double> spin_moments(const SpinAmplitudes &state);

/// Accumulated dynamical phases of every window row of an energy surface
/// along a ramp, relative to the central Fock energy.
class PhaseIntegrator {
 public:
  PhaseIntegrator(const PhysicalSetup &setup, const EnergySurface &surface,
                  const RampSchedule &schedule,
                  double tail_threshold = 1e-12);

  SpinAmplitudes at(double t) const;
  const FockWindow &window() const { return window_; }
  int N() const { return N_; }

 private:
  int N_;
  FockWindow window_;
  RampSchedule schedule_;
  double rate_;  // E_R / (hbar * slope), radians per (E_R * E_R)
  Eigen::VectorXd depths_;
  Eigen::MatrixXd excess_;      // rows: window Na; cols: depth nodes (E_R)
  Eigen::MatrixXd cumulative_;  // running trapezoid of excess over depth
};

SpinAmplitudes evolve_phases(const PhysicalSetup &setup,
                             const EnergySurface &surface,
                             const RampSchedule &schedule, double t);

struct SqueezeTrajectory {
  std::vector<double> t;            // s
  std::vector<double> t_over_unit;  // t / t_unit
  std::vector<double> depth;        // E_R
  std::vector<double> xi2;
  std::vector<double> mean_spin;
  std::vector<double> min_variance;
  std::vector<double> g2_aa, g2_bb, g2_ab;  // central Fock state (empty for OAT models)
  double t_min = 0.0;    // refined location of the minimum of xi2
  double xi2_min = 0.0;
};

/// Times t_j = last_time * j / intervals, j = 0..intervals.
std::vector<double> sample_times(double last_time, int intervals);

SqueezeTrajectory squeeze_trajectory(const PhysicalSetup &setup,
                                     const EnergySurface &surface,
                                     const RampSchedule &schedule,
                                     int intervals, int jobs = 1);

/// Parabolic refinement of a sampled minimum: calls f at the vertex of the
/// parabola through the smallest sample and its neighbours.
template <typename F>
std::pair<double, double> refine_minimum(const std::vector<double> &t,
                                         const std::vector<double> &y, F &&f) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] < y[k]) k = i;
  if (k == 0 || k + 1 >= y.size()) return {t[k], y[k]};
  const double t0 = t[k - 1], t1 = t[k], t2 = t[k + 1];
  const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
  const double den = (t1 - t0) * (y1 - y2) - (t1 - t2) * (y1 - y0);
  if (den == 0.0) return {t1, y1};
  const double num = (t1 - t0) * (t1 - t0) * (y1 - y2) - (t1 - t2) * (t1 - t2) * (y1 - y0);
  const double tv = std::clamp(t1 - 0.5 * num / den, t0, t2);
  const double yv = f(tv);
  return yv < y1 ? std::pair{tv, yv} : std::pair{t1, y1};
}

}  // namespace spinsq
