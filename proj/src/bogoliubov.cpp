#include "spinsq/bogoliubov.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/numerics.hpp"
#include "spinsq/parallel.hpp"

namespace spinsq {

using std::numbers::pi;

double free_gap(double J, const Eigen::Vector3d &ql) {
  return 2.0 * J * (3.0 - ql.array().cos().sum());
}

namespace {

// U_a n_a + U_b n_b and the discriminant root, both in E_R.
std::pair<double, double> interaction_terms(const HubbardParams &p, double na,
                                            double nb) {
  const double ua = p.U_aa * na, ub = p.U_bb * nb;
  const double root = std::sqrt((ua - ub) * (ua - ub) + 4.0 * p.U_ab * p.U_ab * na * nb);
  return {ua + ub, root};
}

[[noreturn]] void unstable(const char *branch, double depth) {
  std::ostringstream msg;
  msg << "Bogoliubov branch " << branch << " is unstable at V0=" << depth
      << " E_R (demixing or attractive couplings)";
  fail(ErrorKind::Regime, msg.str());
}

}  // namespace

Branches frequency_ratio(const HubbardParams &params, double fill_a,
                         double fill_b, double gap) {
  require(fill_a >= 0.0 && fill_b >= 0.0, ErrorKind::Domain,
          "fillings must be non-negative");
  require(gap > 0.0, ErrorKind::Domain, "Bogoliubov spectrum needs q != 0");
  const auto [sum, root] = interaction_terms(params, fill_a, fill_b);
  // (hbar w / dE)^2 = 1 + u_a + u_b +- sqrt((u_a - u_b)^2 + 4 u_ab^2)
  const double plus2 = 1.0 + (sum + root) / gap;
  const double minus2 = 1.0 + (sum - root) / gap;
  if (!(plus2 > 0.0)) unstable("+", params.depth);
  if (!(minus2 > 0.0)) unstable("-", params.depth);
  return {std::sqrt(plus2), std::sqrt(minus2)};
}

Branches spectrum(const PhysicalSetup &setup, const HubbardParams &params,
                  double fill_a, double fill_b, const Eigen::Vector3d &ql) {
  const double gap = free_gap(params.J, ql);
  const auto r = frequency_ratio(params, fill_a, fill_b, gap);
  const double scale = gap * setup.recoil_rate();
  return {r.plus * scale, r.minus * scale};
}

Branches sound_velocity(const PhysicalSetup &setup, const HubbardParams &params,
                        double fill_a, double fill_b) {
  const auto [sum, root] = interaction_terms(params, fill_a, fill_b);
  if (!(sum + root > 0.0)) unstable("+", params.depth);
  if (!(sum - root > 0.0)) unstable("-", params.depth);
  // c^2 = (l/hbar)^2 J (U_a n_a + U_b n_b +- root), energies converted to J
  const double k = setup.period() * setup.recoil_rate();
  return {k * std::sqrt(params.J * (sum + root)), k * std::sqrt(params.J * (sum - root))};
}

namespace {

std::array<double, 2> log_ratio(const HubbardParams &p, double na, double nb,
                                const Eigen::Vector3d &ql) {
  // log(dE / hbar w) = -log(hbar w / dE)
  const auto r = frequency_ratio(p, na, nb, free_gap(p.J, ql));
  return {-std::log(r.plus), -std::log(r.minus)};
}

}  // namespace

Branches drive_rate(const DepthTable &table, const RampSchedule &schedule,
                    double fill_a, double fill_b, const Eigen::Vector3d &ql,
                    double t, double depth_step) {
  require(depth_step > 0.0, ErrorKind::Domain, "depth step must be positive");
  const double v = ramp_at(schedule, t);
  const double lo = std::max(table.lo(), v - depth_step);
  const double hi = std::min(table.hi(), v + depth_step);
  const auto a = log_ratio(table.at(lo), fill_a, fill_b, ql);
  const auto b = log_ratio(table.at(hi), fill_a, fill_b, ql);
  const double f = 0.5 * schedule.slope() / (hi - lo);
  return {f * (b[0] - a[0]), f * (b[1] - a[1])};
}

std::vector<ModeClass> mode_classes(int L) {
  require(L >= 2, ErrorKind::Domain, "mode grid needs L >= 2");
  std::map<std::array<int, 3>, int> count;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        // the gap depends on cos(2 pi m / L) only: fold m -> min(m, L - m)
        std::array<int, 3> key{std::min(i, L - i), std::min(j, L - j), std::min(k, L - k)};
        std::sort(key.begin(), key.end());
        ++count[key];
      }
  std::vector<ModeClass> out;
  for (const auto &[key, mult] : count)
    out.push_back({Eigen::Vector3d(key[0], key[1], key[2]) * (2.0 * pi / L), mult});
  return out;
}

int cube_side(int N) {
  require(N >= 8, ErrorKind::Domain, "Bogoliubov grid needs N >= 8");
  return static_cast<int>(std::lround(std::cbrt(static_cast<double>(N))));
}

ExcitationResult excitation_fraction(const PhysicalSetup &setup, int N,
                                     const RampSchedule &schedule,
                                     const DepthTable &table, double fill_a,
                                     double fill_b, double depth_step,
                                     const IntegratorOptions &options, int jobs) {
  schedule.validate();
  ExcitationResult res;
  res.L = cube_side(N);
  res.effective_N = res.L * res.L * res.L;
  res.classes = mode_classes(res.L);
  const auto n = res.classes.size();
  res.excited_plus.resize(n);
  res.excited_minus.resize(n);
  res.omega_plus_end.resize(n);
  res.omega_minus_end.resize(n);
  std::vector<double> drift_plus(n), drift_minus(n);
  const double rate = setup.recoil_rate();

  parallel_for(2 * n, jobs, [&](std::size_t job) {
    const std::size_t c = job / 2;
    const bool plus = job % 2 == 0;
    const Eigen::Vector3d ql = res.classes[c].ql;
    auto rates = [&](double t) {
      const auto p = table.at(ramp_at(schedule, t));
      const double gap = free_gap(p.J, ql);
      const auto r = frequency_ratio(p, fill_a, fill_b, gap);
      const auto d = drive_rate(table, schedule, fill_a, fill_b, ql, t, depth_step);
      return std::pair{(plus ? r.plus : r.minus) * gap * rate, plus ? d.plus : d.minus};
    };
    const auto m = integrate_mode(rates, 0.0, schedule.duration, options);
    const double occ = std::norm(m.B);
    const double w_end = rates(schedule.duration).first;
    (plus ? res.excited_plus : res.excited_minus)[c] = occ;
    (plus ? res.omega_plus_end : res.omega_minus_end)[c] = w_end;
    (plus ? drift_plus : drift_minus)[c] = m.max_drift;
  });

  CompensatedSum<double> total;
  for (std::size_t c = 0; c < n; ++c) {
    total.add(res.classes[c].multiplicity * (res.excited_plus[c] + res.excited_minus[c]));
    res.max_drift = std::max({res.max_drift, drift_plus[c], drift_minus[c]});
  }
  res.total_fraction = total.value() / res.effective_N;
  return res;
}

AdiabaticTimes adiabatic_time(const PhysicalSetup &setup, int N,
                              const std::vector<HubbardParams> &grid,
                              double v_init, double v_c, double fill_a,
                              double fill_b) {
  require(grid.size() >= 3, ErrorKind::Domain, "adiabatic time needs >= 3 depths");
  require(v_c > v_init, ErrorKind::Domain, "adiabatic time needs V_c > V_init");
  AdiabaticTimes out;
  out.L = cube_side(N);
  const Eigen::Vector3d ql(2.0 * pi / out.L, 0.0, 0.0);
  const auto n = grid.size();
  std::vector<double> rp(n), rm(n), jc_p(n), jc_m(n), v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto &p = grid[k];
    v[k] = p.depth;
    const auto r = frequency_ratio(p, fill_a, fill_b, free_gap(p.J, ql));
    rp[k] = 1.0 / r.plus;
    rm[k] = 1.0 / r.minus;
    const auto c = sound_velocity(setup, p, fill_a, fill_b);
    jc_p[k] = p.J / c.plus;
    jc_m[k] = p.J / c.minus;
  }
  // central differences on the (possibly non-uniform) grid
  auto slope = [&](const std::vector<double> &y, std::size_t k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = std::min(k + 1, n - 1);
    return (y[b] - y[a]) / (v[b] - v[a]);
  };
  const double span = v_c - v_init;
  const double rate = setup.recoil_rate();
  const double asym = std::cbrt(static_cast<double>(N)) * setup.period() / (2.0 * pi);
  for (std::size_t k = 0; k < n; ++k) {
    if (v[k] < v_init - 1e-12 || v[k] > v_c + 1e-12) continue;
    const double gap = free_gap(grid[k].J, ql);
    const double tp = span / (4.0 * gap * rate) * std::abs(slope(rp, k));
    const double tm = span / (4.0 * gap * rate) * std::abs(slope(rm, k));
    if (tp > out.plus) out.plus = tp, out.depth_plus = v[k];
    if (tm > out.minus) out.minus = tm, out.depth_minus = v[k];
    const double scale = asym * span / (4.0 * grid[k].J);
    out.asymptotic_plus = std::max(out.asymptotic_plus, scale * std::abs(slope(jc_p, k)));
    out.asymptotic_minus = std::max(out.asymptotic_minus, scale * std::abs(slope(jc_m, k)));
  }
  return out;
}

}  // namespace spinsq
