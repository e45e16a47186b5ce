#pragma once

// Orchestration of the subcommands. Each run_* writes its files into
// config.output.dir and returns the computed data.

#include <string>
#include <vector>

#include "spinsq/bogoliubov.hpp"
#include "spinsq/config.hpp"
#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/losses.hpp"
#include "spinsq/numerics.hpp"
#include "spinsq/oat.hpp"
#include "spinsq/squeeze.hpp"

namespace spinsq {

struct CriticalDepth {
  double v_c = 0.0;
  bool computed = false;  // true when found with find_vc
};

/// Configured V_c, or the bisection result at fillings (1/2, 1/2).
CriticalDepth resolve_vc(const ScenarioConfig &config);

/// Uniform grid with depth_points nodes on [v_init, v_c], continued at the
/// same spacing until last_depth is covered.
Eigen::VectorXd ramp_depths(double v_init, double v_c, int points, double last_depth);

std::vector<HubbardParams> hubbard_grid(const PhysicalSetup &setup,
                                        const Eigen::VectorXd &depths,
                                        const LatticeOptions &lattice, int jobs);

struct ParamsResult {
  CriticalDepth vc;
  std::vector<HubbardParams> grid;
};

struct SqueezeResult {
  CriticalDepth vc;
  EnergySurface surface;
  bool cache_hit = false;
  ChiCurve chi;
  RampSchedule schedule;  // duration t_best, continued to overshoot * t_best
  SqueezeTrajectory full;
};

struct SweepResult {
  std::vector<int> N;
  std::vector<double> chi_average;  // s^-1
  std::vector<double> t_best;       // s
  std::vector<OatOptimum> exact;    // exact OAT optimum per N
  PowerLawFit fit;
};

struct Figure2Result {
  SqueezeResult squeeze;
  SqueezeTrajectory dynamic, fixed;  // dynamic- and static-OAT
  std::vector<double> T_dynamic, T_static;
  SweepResult sweep;
};

struct AdiabaticResult {
  CriticalDepth vc;
  AdiabaticTimes times;
  double t_best = 0.0;
  double ratio = 0.0;  // t_adiab,- / t_best
  std::vector<double> tau, fraction, drift;
  AdiabaticTimes excitation_times;  // at the excitation N
  std::vector<ExcitationResult> excitation;
};

struct ScenarioOutcome {
  LossScenario scenario;
  std::vector<double> t_best;
  CrossingResult curves;
  bool crossed = false;
  std::string failure;  // no-crossing message
};

struct LossResult {
  CriticalDepth vc;
  std::vector<ScenarioOutcome> scenarios;
};

ParamsResult run_params(const ScenarioConfig &config);
CriticalDepth run_vc(const ScenarioConfig &config);
SqueezeResult run_squeeze(const ScenarioConfig &config);
SweepResult run_oat_scaling(const ScenarioConfig &config);
AdiabaticResult run_adiabatic(const ScenarioConfig &config);
/// Writes every scenario's curves, then raises Regime if any has no crossing.
LossResult run_losses(const ScenarioConfig &config);
Figure2Result run_figure2(const ScenarioConfig &config);
LossResult run_figure3(const ScenarioConfig &config);

}  // namespace spinsq
