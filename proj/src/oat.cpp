#include "spinsq/oat.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/numerics.hpp"
#include "spinsq/parallel.hpp"
#include "spinsq/spin.hpp"

namespace spinsq {

double ChiCurve::ramp_average() const {
  require(v_c > v_init, ErrorKind::Domain, "chi curve needs V_c > V_init");
  const double hi = std::min(v_c, depths(depths.size() - 1));
  return (integrate_to(depths, chi, hi) - integrate_to(depths, chi, v_init)) /
         (v_c - v_init);
}

double ChiCurve::at(double depth) const {
  if (depth >= v_c) return 0.0;
  return interp_linear(depths, chi, depth);
}

ChiCurve chi_of_depth(const PhysicalSetup &setup, const EnergySurface &surface,
                      double v_init, std::optional<double> v_c) {
  const double mid = surface.central_atoms();
  const auto lo = surface.row(mid - 1.0), c = surface.row(mid),
             hi = surface.row(mid + 1.0);
  if (!lo || !c || !hi) {
    std::ostringstream msg;
    msg << "surface lacks the cells Na = " << mid - 1.0 << ", " << mid << ", "
        << mid + 1.0 << " needed for chi";
    fail(ErrorKind::Domain, msg.str());
  }
  ChiCurve curve;
  curve.N = surface.N;
  curve.depths = surface.depths;
  curve.v_init = v_init;
  curve.v_c = v_c.value_or(surface.depths(surface.depths.size() - 1));
  curve.chi.resize(surface.depths.size());
  const double half_rate = 0.5 * setup.recoil_rate();
  for (Eigen::Index k = 0; k < curve.chi.size(); ++k) {
    const double second = surface.cell(*hi, k).total_energy -
                           2.0 * surface.cell(*c, k).total_energy +
                           surface.cell(*lo, k).total_energy;
    curve.chi(k) = (v_c && curve.depths(k) >= *v_c) ? 0.0 : half_rate * second;
  }
  return curve;
}

ChiSample chi_at_depth(const PhysicalSetup &setup, const HubbardParams &params,
                       int N, const GutzwillerOptions &options,
                       const GutzwillerState *warm) {
  auto sc = spin_curvature(params, setup.coordination, N, options, warm);
  return {0.5 * setup.recoil_rate() * sc.second_difference, std::move(sc.center)};
}

ChiCurve chi_curve(const PhysicalSetup &setup, int N,
                   std::span<const HubbardParams> params_by_depth, double v_init,
                   double v_c, const GutzwillerOptions &options, int jobs,
                   std::vector<GutzwillerState> *centers) {
  ChiCurve curve;
  curve.N = N;
  curve.v_init = v_init;
  curve.v_c = v_c;
  const auto n = params_by_depth.size();
  curve.depths.resize(static_cast<Eigen::Index>(n));
  curve.chi.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    curve.depths(static_cast<Eigen::Index>(k)) = params_by_depth[k].depth;
    require(k == 0 || params_by_depth[k].depth > params_by_depth[k - 1].depth,
            ErrorKind::Domain, "depth grid must be strictly increasing");
  }
  const bool have_warm = centers && centers->size() == n;
  std::vector<GutzwillerState> out(n);
  parallel_for(n, jobs, [&](std::size_t k) {
    const auto &p = params_by_depth[k];
    const GutzwillerState *warm = have_warm ? &(*centers)[k] : nullptr;
    if (p.depth >= v_c) {
      out[k] = minimize(p, setup.coordination, 0.5, 0.5, options, warm);
      curve.chi(static_cast<Eigen::Index>(k)) = 0.0;
      return;
    }
    auto s = chi_at_depth(setup, p, N, options, warm);
    curve.chi(static_cast<Eigen::Index>(k)) = s.chi;
    out[k] = std::move(s.center);
  });
  if (centers) *centers = std::move(out);
  return curve;
}

double T_of_t(const ChiCurve &chi, const RampSchedule &schedule, double t) {
  const double v = ramp_at(schedule, t);
  if (t == 0.0) return 0.0;
  const double hi = std::min({v, chi.v_c, chi.depths(chi.depths.size() - 1)});
  if (hi <= schedule.v_init) return 0.0;
  return (integrate_to(chi.depths, chi.chi, hi) -
          integrate_to(chi.depths, chi.chi, schedule.v_init)) /
         schedule.slope();
}

OatPoint oat_xi2(int N, double T) {
  require(N >= 2, ErrorKind::Domain, "OAT evaluation needs N >= 2");
  const double mid = 0.5 * N;
  const auto d = phased_binomial<double>(N, 0, N, [&](int na) {
    return T * (na - mid) * (na - mid);
  });
  const auto sq = xi_squared(spin_moments<double>(N, 0, d));
  return {sq.xi2, sq.mean_spin};
}

double oat_xi2_asymptotic(double N) {
  return 0.5 * std::pow(3.0, 2.0 / 3.0) * std::pow(N, -2.0 / 3.0);
}

double oat_T_asymptotic(double N) {
  return std::pow(3.0, 1.0 / 6.0) * std::pow(N, -2.0 / 3.0);
}

OatOptimum oat_optimum(int N) {
  require(N >= 2, ErrorKind::Domain, "OAT optimum needs N >= 2");
  const double hi = std::min(1.5, 4.0 * oat_T_asymptotic(N));
  constexpr int samples = 400;
  std::vector<double> T(samples + 1), y(samples + 1);
  for (int j = 0; j <= samples; ++j) {
    T[static_cast<std::size_t>(j)] = hi * j / samples;
    try {
      y[static_cast<std::size_t>(j)] = oat_xi2(N, T[static_cast<std::size_t>(j)]).xi2;
    } catch (const Error &) {
      y[static_cast<std::size_t>(j)] = std::numeric_limits<double>::infinity();
    }
  }
  std::size_t k = 0;
  for (std::size_t j = 1; j < y.size(); ++j)
    if (y[j] < y[k]) k = j;
  const double a = T[k == 0 ? 0 : k - 1];
  const double b = T[std::min(k + 1, y.size() - 1)];
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(
      [N](double t) { return oat_xi2(N, t).xi2; }, a, b, 40, iters);
  return {r.first, r.second};
}

double t_best(const ChiCurve &chi) {
  const double avg = chi.ramp_average();
  if (!(avg > 0.0)) {
    std::ostringstream msg;
    msg << "ramp-averaged chi is " << avg
        << " s^-1; squeezing needs the phase-mixed regime (chi > 0)";
    fail(ErrorKind::Domain, msg.str());
  }
  return oat_T_asymptotic(chi.N) / avg;
}

namespace {

double time_unit_or_nan(const PhysicalSetup &setup) {
  try {
    return setup.time_unit();
  } catch (const Error &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

template <typename AngleFn>
SqueezeTrajectory oat_trajectory(const PhysicalSetup &setup, int N,
                                 const std::vector<double> &times,
                                 AngleFn &&angle) {
  SqueezeTrajectory tr;
  tr.t = times;
  const double unit = time_unit_or_nan(setup);
  for (double t : times) {
    const auto p = oat_xi2(N, angle(t));
    tr.t_over_unit.push_back(t / unit);
    tr.xi2.push_back(p.xi2);
    tr.mean_spin.push_back(p.mean_spin);
    tr.min_variance.push_back(p.xi2 * p.mean_spin * p.mean_spin / N);
  }
  const auto best = refine_minimum(tr.t, tr.xi2,
                                   [&](double t) { return oat_xi2(N, angle(t)).xi2; });
  tr.t_min = best.first;
  tr.xi2_min = best.second;
  return tr;
}

}  // namespace

SqueezeTrajectory static_oat_trajectory(const PhysicalSetup &setup, int N,
                                        double chi0,
                                        const std::vector<double> &times) {
  require(chi0 > 0.0, ErrorKind::Domain, "static OAT needs chi0 > 0");
  return oat_trajectory(setup, N, times, [chi0](double t) { return chi0 * t; });
}

SqueezeTrajectory dynamic_oat_trajectory(const PhysicalSetup &setup,
                                         const ChiCurve &chi,
                                         const RampSchedule &schedule,
                                         const std::vector<double> &times) {
  auto tr = oat_trajectory(setup, chi.N, times,
                           [&](double t) { return T_of_t(chi, schedule, t); });
  for (double t : times) tr.depth.push_back(ramp_at(schedule, t));
  return tr;
}

MottResidual mott_residual_estimate(double J, double U, double N) {
  require(U > 0.0, ErrorKind::Domain, "Mott residual estimate needs U > 0");
  require(J >= 0.0 && N >= 1.0, ErrorKind::Domain,
          "Mott residual estimate needs J >= 0 and N >= 1");
  MottResidual r;
  const double ratio = J / U;
  r.threshold = std::pow(N, -2.0 / 3.0);
  r.gap_product = ratio * ratio / N;
  r.critical_product = ratio * r.threshold;
  // "much smaller" read as at least one decade below
  r.gap_negligible = r.gap_product <= 0.1 * r.threshold;
  r.critical_negligible = r.critical_product <= 0.1 * r.threshold;
  return r;
}

}  // namespace spinsq
