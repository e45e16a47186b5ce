#pragma once

// Template definitions for bogoliubov.hpp.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinsq/error.hpp"

namespace spinsq {
namespace detail {

using Mat2c = Eigen::Matrix2cd;

// exp of a traceless 2x2 matrix: X^2 = -det(X) I.
inline Mat2c expm_traceless(const Mat2c &x) {
  const std::complex<double> s = std::sqrt(-x.determinant());
  const std::complex<double> shc =
      std::abs(s) < 1e-6 ? 1.0 + s * s / 6.0 : std::sinh(s) / s;
  return std::cosh(s) * Mat2c::Identity() + shc * x;
}

inline Mat2c mode_generator(double w, double drive) {
  Mat2c m;
  m << std::complex<double>(0.0, -w), -drive, -drive, std::complex<double>(0.0, w);
  return m;
}

template <typename Rates>
Mat2c magnus4(Rates &rates, double t, double h) {
  constexpr double c = 0.28867513459481287;  // sqrt(3)/6
  const auto [w1, d1] = rates(t + (0.5 - c) * h);
  const auto [w2, d2] = rates(t + (0.5 + c) * h);
  const Mat2c m1 = mode_generator(w1, d1), m2 = mode_generator(w2, d2);
  const Mat2c gen = 0.5 * h * (m1 + m2) + (c / 2.0) * h * h * (m2 * m1 - m1 * m2);
  return expm_traceless(gen);
}

}  // namespace detail

template <typename Rates>
ModeAmplitudes integrate_mode(Rates &&rates, double t0, double t1,
                              const IntegratorOptions &options) {
  ModeAmplitudes out;
  Eigen::Vector2cd y(1.0, 0.0);
  if (!(t1 > t0)) return out;
  const auto [w0, d0] = rates(t0);
  double h = std::min((t1 - t0) / 16.0,
                      0.5 / std::max({std::abs(w0), std::abs(d0), 1e-300}));
  double t = t0;
  while (t < t1) {
    if (++out.steps > options.max_steps)
      fail(ErrorKind::Convergence, "Bogoliubov mode integration exceeded its step budget");
    const bool last = t + h >= t1;
    const double step = last ? t1 - t : h;
    const Eigen::Vector2cd big = detail::magnus4(rates, t, step) * y;
    const Eigen::Vector2cd half =
        detail::magnus4(rates, t + 0.5 * step, 0.5 * step) *
        (detail::magnus4(rates, t, 0.5 * step) * y);
    const double err = (big - half).norm() / 15.0;
    const double scale = options.rel_tol * std::max(1.0, half.norm());
    if (err <= scale || step < 1e-14 * (t1 - t0)) {
      y = half;
      t = last ? t1 : t + step;
      const double drift = std::abs(std::norm(y(0)) - std::norm(y(1)) - 1.0);
      out.max_drift = std::max(out.max_drift, drift);
      if (drift > options.drift_tol) {
        std::ostringstream msg;
        msg << "symplectic invariant drifted by " << drift << " at t=" << t;
        fail(ErrorKind::Accuracy, msg.str());
      }
    }
    const double ratio = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
    h = step * std::clamp(ratio, 0.2, 4.0);
  }
  out.A = y(0);
  out.B = y(1);
  return out;
}

}  // namespace spinsq
