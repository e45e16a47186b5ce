#pragma once

// Effective one-axis-twisting reduction H = hbar chi(t) S_z^2 of the ramp.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/squeeze.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

struct ChiCurve {
  int N = 0;
  Eigen::VectorXd depths;  // E_R, strictly increasing
  Eigen::VectorXd chi;     // s^-1
  double v_init = 0.0;
  double v_c = 0.0;

  /// (V_c - V_init)^-1 int_{V_init}^{V_c} chi dV0
  double ramp_average() const;
  double at(double depth) const;  // linear interpolation, 0 beyond V_c
};

/// chi from the one-atom-transfer second difference of the surface,
/// [E0(Na+1) - 2 E0(Na) + E0(Na-1)] / (2 hbar) at Na = N/2. Depths at or
/// beyond v_c (when given) are set to zero.
ChiCurve chi_of_depth(const PhysicalSetup &setup, const EnergySurface &surface,
                      double v_init, std::optional<double> v_c = std::nullopt);

struct ChiSample {
  double chi = 0.0;          // s^-1
  GutzwillerState center;    // fillings (1/2, 1/2)
};

/// chi at one depth from the chemical-potential route (see spin_curvature).
ChiSample chi_at_depth(const PhysicalSetup &setup, const HubbardParams &params,
                       int N, const GutzwillerOptions &options = {},
                       const GutzwillerState *warm = nullptr);

/// chi over a depth grid without tabulating the full surface. Depths at or
/// beyond v_c are zero. Optionally returns the central states.
ChiCurve chi_curve(const PhysicalSetup &setup, int N,
                   std::span<const HubbardParams> params_by_depth, double v_init,
                   double v_c, const GutzwillerOptions &options = {},
                   int jobs = 1, std::vector<GutzwillerState> *centers = nullptr);

/// T(t) = int_0^t chi(V0(t')) dt' along the ramp.
double T_of_t(const ChiCurve &chi, const RampSchedule &schedule, double t);

struct OatPoint {
  double xi2 = 0.0;
  double mean_spin = 0.0;  // (N/2) cos^{N-1}(T)
};

/// Exact two-mode evaluation with phases T (Na - N/2)^2 (no window).
OatPoint oat_xi2(int N, double T);

struct OatOptimum {
  double T = 0.0;
  double xi2 = 0.0;
};

/// Minimum of oat_xi2 over T: coarse scan, then Brent.
OatOptimum oat_optimum(int N);

/// Asymptotic optimum: xi2 ~ 3^{2/3}/2 N^{-2/3}, T ~ 3^{1/6} N^{-2/3}.
double oat_xi2_asymptotic(double N);
double oat_T_asymptotic(double N);

/// 3^{1/6} N^{-2/3} / <chi>.
double t_best(const ChiCurve &chi);

SqueezeTrajectory static_oat_trajectory(const PhysicalSetup &setup, int N,
                                        double chi0,
                                        const std::vector<double> &times);

SqueezeTrajectory dynamic_oat_trajectory(const PhysicalSetup &setup,
                                         const ChiCurve &chi,
                                         const RampSchedule &schedule,
                                         const std::vector<double> &times);

struct MottResidual {
  double gap_product = 0.0;       // (J/U)^2 / N
  double critical_product = 0.0;  // (J/U) N^{-2/3}
  double threshold = 0.0;         // N^{-2/3}
  bool gap_negligible = false;       // at least a decade below threshold
  bool critical_negligible = false;
};

MottResidual mott_residual_estimate(double J, double U, double N);

}  // namespace spinsq
