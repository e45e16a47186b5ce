#pragma once

// Mean-number two- and three-body loss rate equations along the ramp.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "spinsq/lattice.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

struct LossScenario {
  std::string name;   // config section suffix, used in file names
  std::string label;
  double K2_a = 0.0, K2_b = 0.0, K2_ab = 0.0;  // m^3/s
  double K3_a = 0.0, K3_b = 0.0;               // m^6/s

  void validate() const;
  bool any() const { return K2_a > 0 || K2_b > 0 || K2_ab > 0 || K3_a > 0 || K3_b > 0; }
};

/// |1,1> <-> |2,-1> with a Feshbach-tuned interspecies length: two-body only.
LossScenario two_body_scenario();
/// |1,-1> <-> |2,-2>: three-body only.
LossScenario three_body_scenario();

struct LossRates {
  double g2_a = 0.0, g2_b = 0.0, g2_ab = 0.0;  // s^-1
  double g3_a = 0.0, g3_b = 0.0;
};

/// gamma^(m) = K^(m) I_m / M^{m-1}; the interspecies term carries 1/(2M).
LossRates loss_coefficients(const HubbardParams &params,
                            const LossScenario &scenario, double sites);

/// On-site correlations of the central filling state along the depth grid.
struct CorrelationCurve {
  Eigen::VectorXd depths;
  Eigen::VectorXd g2_aa, g2_bb, g2_ab, g3_a, g3_b;
};

struct LossTrajectory {
  std::vector<double> t;
  std::vector<double> n_a, n_b;
  std::vector<double> lost_fraction;
};

/// Integrates the rate equations from N/2 atoms per component, sampling at
/// the requested times (ascending, starting at 0). Uses M = N lattice sites.
/// `params_at(depth)` supplies the Wannier integrals along the ramp.
LossTrajectory evolve_losses(int N, const RampSchedule &schedule,
                             const std::function<HubbardParams(double)> &params_at,
                             const CorrelationCurve &correlations,
                             const LossScenario &scenario,
                             const std::vector<double> &times);

struct CrossingResult {
  double n_max = 0.0;
  std::vector<double> N;
  std::vector<double> lost_fraction;
  std::vector<double> xi2_best;
};

/// N_max where the lost fraction at t_best(N) meets xi2_best(N), located by
/// log-log interpolation on the sampled grid.
CrossingResult loss_crossing(const std::vector<double> &N,
                             const std::vector<double> &lost_fraction,
                             const std::vector<double> &xi2_best);

}  // namespace spinsq
