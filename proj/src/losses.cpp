#include "spinsq/losses.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/numerics.hpp"

namespace spinsq {

void LossScenario::validate() const {
  require(K2_a >= 0 && K2_b >= 0 && K2_ab >= 0 && K3_a >= 0 && K3_b >= 0,
          ErrorKind::Config, "loss rate constants must be non-negative");
}

LossScenario two_body_scenario() {
  LossScenario s;
  s.name = "a";
  s.label = "two-body |1,1>-|2,-1>";
  s.K2_b = 8.1e-20;
  s.K2_ab = 1.708e-19;
  return s;
}

LossScenario three_body_scenario() {
  LossScenario s;
  s.name = "b";
  s.label = "three-body |1,-1>-|2,-2>";
  s.K3_a = 5.4e-42;
  s.K3_b = 1.8e-41;
  return s;
}

LossRates loss_coefficients(const HubbardParams &params,
                            const LossScenario &scenario, double sites) {
  require(sites > 0.0, ErrorKind::Domain, "site count must be positive");
  LossRates r;
  r.g2_a = scenario.K2_a * params.I2 / sites;
  r.g2_b = scenario.K2_b * params.I2 / sites;
  r.g2_ab = scenario.K2_ab * params.I2 / (2.0 * sites);
  r.g3_a = scenario.K3_a * params.I3 / (sites * sites);
  r.g3_b = scenario.K3_b * params.I3 / (sites * sites);
  return r;
}

LossTrajectory evolve_losses(int N, const RampSchedule &schedule,
                             const std::function<HubbardParams(double)> &params_at,
                             const CorrelationCurve &correlations,
                             const LossScenario &scenario,
                             const std::vector<double> &times) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  scenario.validate();
  require(N >= 1 && !times.empty() && times.front() == 0.0, ErrorKind::Domain,
          "loss evolution needs N >= 1 and sample times starting at 0");
  const auto &c = correlations;
  const double sites = N;

  auto rhs = [&](const State &n, State &dn, double t) {
    const double v = ramp_at(schedule, std::min(t, schedule.last_time()));
    const auto r = loss_coefficients(params_at(v), scenario, sites);
    const double g2a = interp_linear(c.depths, c.g2_aa, v);
    const double g2b = interp_linear(c.depths, c.g2_bb, v);
    const double g2ab = interp_linear(c.depths, c.g2_ab, v);
    const double g3a = interp_linear(c.depths, c.g3_a, v);
    const double g3b = interp_linear(c.depths, c.g3_b, v);
    const double cross = r.g2_ab * g2ab * n[0] * n[1];
    dn[0] = -r.g2_a * g2a * n[0] * n[0] - cross - r.g3_a * g3a * n[0] * n[0] * n[0];
    dn[1] = -r.g2_b * g2b * n[1] * n[1] - cross - r.g3_b * g3b * n[1] * n[1] * n[1];
  };

  LossTrajectory out;
  State n{0.5 * N, 0.5 * N};
  auto observe = [&](const State &s, double t) {
    if (s[0] < 0.0 || s[1] < 0.0) {
      std::ostringstream msg;
      msg << "negative population at t=" << t << " s (integrator failure)";
      fail(ErrorKind::Accuracy, msg.str());
    }
    out.t.push_back(t);
    out.n_a.push_back(s[0]);
    out.n_b.push_back(s[1]);
    out.lost_fraction.push_back(1.0 - (s[0] + s[1]) / N);
  };
  if (times.size() == 1) {
    observe(n, 0.0);
    return out;
  }
  const double dt0 = (times.back() - times.front()) * 1e-4;
  odeint::integrate_times(
      odeint::make_dense_output(1e-14 * N, 1e-11, odeint::runge_kutta_dopri5<State>()),
      rhs, n, times.begin(), times.end(), dt0, observe);
  return out;
}

CrossingResult loss_crossing(const std::vector<double> &N,
                             const std::vector<double> &lost_fraction,
                             const std::vector<double> &xi2_best) {
  require(N.size() == lost_fraction.size() && N.size() == xi2_best.size() &&
              N.size() >= 2,
          ErrorKind::Domain, "crossing needs >= 2 matched samples");
  CrossingResult res{0.0, N, lost_fraction, xi2_best};
  // f = log(lost) - log(xi2) changes sign at the crossing
  auto f = [&](std::size_t i) {
    return lost_fraction[i] > 0.0 ? std::log(lost_fraction[i]) - std::log(xi2_best[i])
                                  : -std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i + 1 < N.size(); ++i) {
    const double a = f(i), b = f(i + 1);
    if (a < 0.0 && b >= 0.0 && std::isfinite(a)) {
      const double s = -a / (b - a);
      res.n_max = std::exp(std::log(N[i]) + s * (std::log(N[i + 1]) - std::log(N[i])));
      return res;
    }
    if (a >= 0.0 && i == 0) break;
  }
  std::ostringstream msg;
  msg << "no crossing of lost fraction and best squeezing on N in [" << N.front()
      << ", " << N.back() << "]: at N=" << N.front() << " lost "
      << lost_fraction.front() << " vs xi2 " << xi2_best.front() << "; at N="
      << N.back() << " lost " << lost_fraction.back() << " vs xi2 "
      << xi2_best.back();
  fail(ErrorKind::Regime, msg.str());
}

}  // namespace spinsq
