#pragma once

// Two-component lattice Bogoliubov modes of the uniform superfluid along the
// ramp: spectrum, drive rate and per-mode excitation (A, B) dynamics.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "spinsq/lattice.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

/// Free lattice gap 2 J sum_g (1 - cos(q_g l)) in E_R; q given as q l.
double free_gap(double J, const Eigen::Vector3d &ql);

struct Branches {
  double plus = 0.0;   // s^-1
  double minus = 0.0;
};

/// hbar omega / Delta E for both branches (dimensionless).
Branches frequency_ratio(const HubbardParams &params, double fill_a,
                         double fill_b, double gap);

/// Branch frequencies omega_{q,+-} in s^-1.
Branches spectrum(const PhysicalSetup &setup, const HubbardParams &params,
                  double fill_a, double fill_b, const Eigen::Vector3d &ql);

/// Sound velocities c_+- in m/s (small-q slope of omega).
Branches sound_velocity(const PhysicalSetup &setup, const HubbardParams &params,
                        double fill_a, double fill_b);

/// Omega_{q,+-}(t) = 1/2 d/dt log(Delta E_q / hbar omega_q), by a central
/// difference of one depth step along the ramp (one-sided at the ends).
Branches drive_rate(const DepthTable &table, const RampSchedule &schedule,
                    double fill_a, double fill_b, const Eigen::Vector3d &ql,
                    double t, double depth_step);

struct ModeAmplitudes {
  std::complex<double> A{1.0, 0.0};
  std::complex<double> B{0.0, 0.0};
  double max_drift = 0.0;  // max | |A|^2 - |B|^2 - 1 | along the path
  int steps = 0;
};

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double drift_tol = 1e-6;
  int max_steps = 50'000'000;
};

/// Integrates dA/dt = -i w A - W B, dB/dt = -W A + i w B from (1, 0) over
/// [t0, t1] with fourth-order Magnus steps and step-doubling error control.
/// rates(t) returns {w, W} in s^-1. The propagators lie in SU(1,1), so
/// |A|^2 - |B|^2 is kept to round-off.
template <typename Rates>
ModeAmplitudes integrate_mode(Rates &&rates, double t0, double t1,
                              const IntegratorOptions &options = {});

struct ModeClass {
  Eigen::Vector3d ql;  // representative q l
  int multiplicity = 0;
};

/// Nonzero q of the L^3 grid grouped into classes of equal free gap.
std::vector<ModeClass> mode_classes(int L);

struct ExcitationResult {
  int L = 0;
  int effective_N = 0;  // L^3
  std::vector<ModeClass> classes;
  std::vector<double> excited_plus, excited_minus;  // |B|^2 per class
  std::vector<double> omega_plus_end, omega_minus_end;  // s^-1 at the ramp end
  double total_fraction = 0.0;  // (1/N) sum_q sum_+- |B|^2
  double max_drift = 0.0;
};

ExcitationResult excitation_fraction(const PhysicalSetup &setup, int N,
                                     const RampSchedule &schedule,
                                     const DepthTable &table, double fill_a,
                                     double fill_b, double depth_step,
                                     const IntegratorOptions &options = {},
                                     int jobs = 1);

struct AdiabaticTimes {
  int L = 0;
  double plus = 0.0, minus = 0.0;  // s, max over the ramp
  double depth_plus = 0.0, depth_minus = 0.0;
  double asymptotic_plus = 0.0, asymptotic_minus = 0.0;
};

/// t_adiab,+- = (V_c - V_init) hbar / (4 Delta E_q) |d/dV0 (Delta E_q / hbar w)|
/// at the smallest nonzero q, maximized over the depth grid; plus the
/// large-N form N^{1/3} l / (2 pi) (V_c - V_init) / (4 J) |d(J/c)/dV0|.
AdiabaticTimes adiabatic_time(const PhysicalSetup &setup, int N,
                              const std::vector<HubbardParams> &grid,
                              double v_init, double v_c, double fill_a = 0.5,
                              double fill_b = 0.5);

int cube_side(int N);

}  // namespace spinsq

#include "spinsq/bogoliubov_impl.hpp"
