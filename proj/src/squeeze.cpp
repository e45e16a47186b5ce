#include "spinsq/squeeze.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/numerics.hpp"
#include "spinsq/parallel.hpp"

namespace spinsq {

FockWindow fock_window(int N, double min_half_width) {
  require(N >= 1, ErrorKind::Domain, "Fock window needs N >= 1");
  const double half = std::max(min_half_width, 5.0 * std::sqrt(static_cast<double>(N)));
  FockWindow w;
  w.lo = std::max(0, static_cast<int>(std::ceil(0.5 * N - half)));
  w.hi = std::min(N, static_cast<int>(std::floor(0.5 * N + half)));
  const boost::math::binomial_distribution<double> dist(N, 0.5);
  if (w.lo > 0) w.tail_mass += boost::math::cdf(dist, w.lo - 1);
  if (w.hi < N) w.tail_mass += boost::math::cdf(boost::math::complement(dist, w.hi));
  return w;
}

SpinAmplitudes make_amplitudes(int N, const FockWindow &window,
                               const Eigen::VectorXd &phase) {
  require(phase.size() == window.hi - window.lo + 1, ErrorKind::Domain,
          "phase vector does not match the Fock window");
  SpinAmplitudes s;
  s.N = N;
  s.window = window;
  s.phase.resize(phase.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index k = 0; k < phase.size(); ++k) {
    double p = std::fmod(phase(k), two_pi);
    if (p < 0.0) p += two_pi;
    s.phase(k) = p;
  }
  s.d = phased_binomial<double>(N, window.lo, window.hi,
                                [&](int na) { return s.phase(na - window.lo); });
  return s;
}

SpinMoments<double> spin_moments(const SpinAmplitudes &state) {
  return spin_moments<double>(state.N, state.window.lo, state.d);
}

PhaseIntegrator::PhaseIntegrator(const PhysicalSetup &setup,
                                 const EnergySurface &surface,
                                 const RampSchedule &schedule,
                                 double tail_threshold)
    : N_(surface.N), window_(fock_window(surface.N)), schedule_(schedule) {
  schedule.validate();
  if (window_.tail_mass > tail_threshold) {
    std::ostringstream msg;
    msg << "Fock window tail mass " << window_.tail_mass << " exceeds "
        << tail_threshold;
    fail(ErrorKind::Accuracy, msg.str());
  }
  depths_ = surface.depths;
  const auto nd = depths_.size();
  require(nd >= 2, ErrorKind::Domain, "surface needs at least two depths");
  if (depths_(0) > schedule.v_init + 1e-9 ||
      depths_(nd - 1) < schedule.last_depth() - 1e-9) {
    std::ostringstream msg;
    msg << "surface depths [" << depths_(0) << ", " << depths_(nd - 1)
        << "] do not cover the ramp [" << schedule.v_init << ", "
        << schedule.last_depth() << "]";
    fail(ErrorKind::Domain, msg.str());
  }
  const auto ref = surface.row(surface.central_atoms());
  require(ref.has_value(), ErrorKind::Domain,
          "surface lacks the central Fock row N/2");

  const int rows = window_.hi - window_.lo + 1;
  excess_.resize(rows, nd);
  for (int r = 0; r < rows; ++r) {
    const auto row = surface.row(window_.lo + r);
    if (!row) {
      std::ostringstream msg;
      msg << "surface lacks the row Na=" << window_.lo + r
          << " required by the Fock window";
      fail(ErrorKind::Domain, msg.str());
    }
    for (Eigen::Index k = 0; k < nd; ++k)
      excess_(r, k) = surface.cell(*row, k).total_energy -
                      surface.cell(*ref, k).total_energy;
  }
  cumulative_ = Eigen::MatrixXd::Zero(rows, nd);
  for (Eigen::Index k = 1; k < nd; ++k)
    cumulative_.col(k) = cumulative_.col(k - 1) +
                         0.5 * (depths_(k) - depths_(k - 1)) *
                             (excess_.col(k) + excess_.col(k - 1));
  rate_ = setup.recoil_rate() / schedule.slope();
}

SpinAmplitudes PhaseIntegrator::at(double t) const {
  const double v = ramp_at(schedule_, t);
  const auto rows = excess_.rows();
  // exact integral of the piecewise-linear rows from v_init to v
  auto integral = [&](Eigen::Index r, double upper) {
    const auto k = bracket(depths_, upper);
    const double d = upper - depths_(k);
    const double h = depths_(k + 1) - depths_(k);
    return cumulative_(r, k) + excess_(r, k) * d +
           0.5 * (excess_(r, k + 1) - excess_(r, k)) * d * d / h;
  };
  Eigen::VectorXd phase(rows);
  for (Eigen::Index r = 0; r < rows; ++r)
    phase(r) = rate_ * (integral(r, v) - integral(r, schedule_.v_init));
  return make_amplitudes(N_, window_, phase);
}

SpinAmplitudes evolve_phases(const PhysicalSetup &setup,
                             const EnergySurface &surface,
                             const RampSchedule &schedule, double t) {
  return PhaseIntegrator(setup, surface, schedule).at(t);
}

std::vector<double> sample_times(double last_time, int intervals) {
  require(intervals >= 1 && last_time > 0.0, ErrorKind::Domain,
          "time sampling needs a positive span and >= 1 interval");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int j = 0; j <= intervals; ++j)
    t[static_cast<std::size_t>(j)] =
        last_time * (static_cast<double>(j) / static_cast<double>(intervals));
  return t;
}

namespace {

double time_unit_or_nan(const PhysicalSetup &setup) {
  try {
    return setup.time_unit();
  } catch (const Error &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SqueezeTrajectory squeeze_trajectory(const PhysicalSetup &setup,
                                     const EnergySurface &surface,
                                     const RampSchedule &schedule,
                                     int intervals, int jobs) {
  const PhaseIntegrator phases(setup, surface, schedule);
  SqueezeTrajectory tr;
  tr.t = sample_times(schedule.last_time(), intervals);
  const auto n = tr.t.size();
  tr.xi2.resize(n);
  tr.mean_spin.resize(n);
  tr.min_variance.resize(n);
  tr.depth.resize(n);
  parallel_for(n, jobs, [&](std::size_t j) {
    const auto sq = xi_squared(spin_moments(phases.at(tr.t[j])));
    tr.xi2[j] = sq.xi2;
    tr.mean_spin[j] = sq.mean_spin;
    tr.min_variance[j] = sq.min_variance;
    tr.depth[j] = ramp_at(schedule, tr.t[j]);
  });

  const double unit = time_unit_or_nan(setup);
  const auto ref = *surface.row(surface.central_atoms());
  Eigen::VectorXd g2aa(surface.depths.size()), g2bb(g2aa.size()), g2ab(g2aa.size());
  for (Eigen::Index k = 0; k < g2aa.size(); ++k) {
    g2aa(k) = surface.cell(ref, k).g2_aa;
    g2bb(k) = surface.cell(ref, k).g2_bb;
    g2ab(k) = surface.cell(ref, k).g2_ab;
  }
  for (std::size_t j = 0; j < n; ++j) {
    tr.t_over_unit.push_back(tr.t[j] / unit);
    tr.g2_aa.push_back(interp_linear(surface.depths, g2aa, tr.depth[j]));
    tr.g2_bb.push_back(interp_linear(surface.depths, g2bb, tr.depth[j]));
    tr.g2_ab.push_back(interp_linear(surface.depths, g2ab, tr.depth[j]));
  }
  const auto best = refine_minimum(tr.t, tr.xi2, [&](double t) {
    return xi_squared(spin_moments(phases.at(t))).xi2;
  });
  tr.t_min = best.first;
  tr.xi2_min = best.second;
  return tr;
}

}  // namespace spinsq
