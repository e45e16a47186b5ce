#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "spinsq/error.hpp"

namespace spinsq {

/// Neumaier-compensated accumulator; the result does not depend on how terms
/// were grouped beforehand, only on their order.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

inline Eigen::VectorXd uniform_grid(double lo, double hi, int points) {
  require(points >= 2, ErrorKind::Domain, "uniform grid needs >= 2 points");
  Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(points, lo, hi);
  g(points - 1) = hi;
  return g;
}

/// Trapezoidal integral of samples y over abscissae x.
template <typename XVec, typename YVec>
double trapezoid(const XVec &x, const YVec &y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (x(i + 1) - x(i)) * (y(i) + y(i + 1));
  return s;
}

/// Index k with x(k) <= v <= x(k+1) on a strictly increasing grid, clamped.
template <typename XVec>
Eigen::Index bracket(const XVec &x, double v) {
  const auto n = x.size();
  if (v <= x(0)) return 0;
  if (v >= x(n - 1)) return n - 2;
  const auto *b = x.data();
  const auto *it = std::upper_bound(b, b + n, v);
  return static_cast<Eigen::Index>(it - b) - 1;
}

template <typename XVec, typename YVec>
double interp_linear(const XVec &x, const YVec &y, double v) {
  const auto k = bracket(x, v);
  const double h = x(k + 1) - x(k);
  const double s = (v - x(k)) / h;
  return y(k) + s * (y(k + 1) - y(k));
}

/// Running trapezoid integral of piecewise-linear y from x(0) up to v.
template <typename XVec, typename YVec>
double integrate_to(const XVec &x, const YVec &y, double v) {
  if (v <= x(0)) return 0.0;
  double s = 0.0;
  Eigen::Index k = 0;
  for (; k + 1 < x.size() && x(k + 1) <= v; ++k)
    s += 0.5 * (x(k + 1) - x(k)) * (y(k) + y(k + 1));
  if (k + 1 < x.size() && v > x(k)) {
    const double h = x(k + 1) - x(k);
    const double d = v - x(k);
    s += y(k) * d + 0.5 * (y(k + 1) - y(k)) * d * d / h;
  }
  return s;
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double exponent_stderr = 0.0;
};

/// Least-squares fit of y = prefactor * x^exponent in log-log space.
inline PowerLawFit fit_power_law(std::span<const double> x,
                                 std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::Domain,
          "power-law fit needs >= 2 matched points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::Domain,
            "power-law fit needs positive data");
    a(i, 0) = 1.0;
    a(i, 1) = std::log(x[i]);
    b(i) = std::log(y[i]);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  PowerLawFit fit{c(1), std::exp(c(0)), 0.0};
  if (n > 2) {
    const double rss = (a * c - b).squaredNorm();
    const Eigen::Matrix2d cov =
        (a.transpose() * a).inverse() * (rss / static_cast<double>(n - 2));
    fit.exponent_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
  }
  return fit;
}

}  // namespace spinsq
