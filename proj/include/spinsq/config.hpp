#pragma once

// Scenario configuration: INI-style sections parsed with boost::property_tree.
//
//   [setup]      mass_amu, wavelength_m, a_aa, a_bb, a_ab, coordination,
//                hbar, bohr_m, amu_kg
//   [lattice]    plane_waves, quasi_momenta, points_per_site, min_depth
//   [gutzwiller] n_max, tol, max_iter, random_starts, seed
//   [run]        N, v_init, v_c, depth_points, time_intervals, overshoot,
//                vc_tol, sweep_N, table_points
//   [adiabatic]  N, excitation_N, tau_factors
//   [losses]     scenarios, N_min, N_max, N_points, exact_reference
//   [scenario.<name>] label, K2_a, K2_b, K2_ab, K3_a, K3_b
//   [output]     dir, cache, jobs, grid_scale

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/losses.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

struct RunConfig {
  int N = 125;
  double v_init = 2.0;
  std::optional<double> v_c;  // computed with find_vc when absent
  int depth_points = 200;
  int time_intervals = 400;
  double overshoot = 1.25;  // ramp continued to overshoot * t_best
  double vc_tol = 1e-4;
  std::vector<int> sweep_N{125, 1000, 10000, 100000};
  int table_points = 161;  // spline nodes for DepthTable
};

struct AdiabaticConfig {
  int N = 10000;
  int excitation_N = 1000;
  std::vector<double> tau_factors{0.3, 1.0, 3.0, 10.0, 30.0};  // multiples of t_adiab,-
};

struct LossConfig {
  std::vector<LossScenario> scenarios{two_body_scenario(), three_body_scenario()};
  double N_min = 10.0;
  double N_max = 1e6;
  int N_points = 31;
  bool exact_reference = false;  // exact OAT minima instead of the asymptotic xi2_best
};

struct OutputConfig {
  std::string dir = "out";
  std::string cache;  // empty: no surface cache
  int jobs = 1;
  double grid_scale = 1.0;
};

struct ScenarioConfig {
  PhysicalSetup setup;
  LatticeOptions lattice;
  GutzwillerOptions gutzwiller;
  RunConfig run;
  AdiabaticConfig adiabatic;
  LossConfig losses;
  OutputConfig output;

  /// key = value for every physics field; defaulted ones are marked.
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<std::string> defaulted;

  /// FNV-1a over the physics echo (output block excluded).
  std::string hash() const;
  int depth_points() const;
  int time_intervals() const;
  int loss_points() const;
};

ScenarioConfig default_config();
ScenarioConfig parse_config(std::istream &in, const std::string &source = "<input>");
ScenarioConfig load_config(const std::string &path);

/// Recomputes the echo after programmatic changes (CLI overrides, tests).
void refresh_echo(ScenarioConfig &config);

std::uint64_t fnv1a(const std::string &text, std::uint64_t seed = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);

}  // namespace spinsq
