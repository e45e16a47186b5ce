#pragma once

// Lowest Bloch band of the separable cubic lattice V0 sum sin^2(k x_i),
// Wannier moments and the depth-dependent Bose-Hubbard parameters.
//
// Conventions: quasi-momentum q is measured in units of k, so the first
// Brillouin zone is q in [-1, 1]; positions inside the Wannier construction
// are measured in units of 1/k (one lattice site spans pi).

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "spinsq/units.hpp"

namespace spinsq {

struct LatticeOptions {
  int plane_waves = 21;       // odd, >= 11
  int quasi_momenta = 64;     // Bloch functions summed into the Wannier function
  int points_per_site = 96;   // real-space grid for Wannier moments
  double min_depth = 2.0;     // E_R; below this the tight-binding reading is off
  double band_tolerance = 1e-10;
  double normalization_tolerance = 1e-8;
};

struct BandSamples {
  Eigen::VectorXd q;       // units of k, symmetric about 0
  Eigen::VectorXd energy;  // E_R
};

/// Lowest-band energy at a single quasi-momentum.
double lowest_band_energy(double depth, double q, int plane_waves);

/// Lowest band on samples+1 equally spaced points covering [-1, 1]. Checks
/// the cutoff by comparing with plane_waves + 4.
BandSamples band_structure(double depth, int plane_waves, int samples = 64,
                           double tolerance = 1e-10);

struct HubbardParams {
  double depth = 0.0;   // E_R
  double J = 0.0;       // E_R
  double U_aa = 0.0;    // E_R
  double U_bb = 0.0;
  double U_ab = 0.0;
  double wannier_m2 = 0.0;  // dimensionless (int w^4 dx)^3, x in units of 1/k
  double wannier_m3 = 0.0;  // dimensionless (int w^6 dx)^3
  double I2 = 0.0;          // m^-3
  double I3 = 0.0;          // m^-6
};

/// Real, site-centred 1D Wannier function sampled over the periodic box.
struct WannierProfile {
  Eigen::VectorXd x;  // units of 1/k
  Eigen::VectorXd w;  // normalized so that sum w^2 dx = 1
  double dx = 0.0;
  double raw_norm = 0.0;  // integral of w^2 before rescaling
};

WannierProfile wannier_function(double depth, const LatticeOptions &options);

/// One-dimensional moment int w^{2m} dx (x in units of 1/k).
double wannier_moment_1d(const WannierProfile &profile, int m);

/// -<w_0|H|w_1>, the nearest-neighbour matrix element, from the Fourier
/// coefficient of the band (E_R).
double nearest_neighbor_hopping(double depth, const LatticeOptions &options);

HubbardParams hubbard_params(const PhysicalSetup &setup, double depth,
                             const LatticeOptions &options = {});

/// Linear lattice ramp V0(t) = V_init + (V_c - V_init) t / duration. The ramp
/// may be continued past the transition up to end_time >= duration at the
/// same slope.
struct RampSchedule {
  double v_init = 2.0;
  double v_c = 0.0;
  double duration = 0.0;  // s
  double end_time = 0.0;  // s; 0 means "equal to duration"

  double slope() const { return (v_c - v_init) / duration; }  // E_R / s
  double last_time() const { return end_time > 0.0 ? end_time : duration; }
  double last_depth() const { return v_init + slope() * last_time(); }
  void validate(double min_depth = 0.0) const;
};

double ramp_at(const RampSchedule &schedule, double t);

/// Inverse of the ramp: time at which depth v is reached.
double ramp_time(const RampSchedule &schedule, double v);

/// Hubbard parameters tabulated on a uniform depth grid with cubic-spline
/// interpolation in between (log J, Wannier moments).
class DepthTable {
 public:
  DepthTable(const PhysicalSetup &setup, double lo, double hi, int points,
             const LatticeOptions &options = {}, int jobs = 1);

  HubbardParams at(double depth) const;
  const std::vector<HubbardParams> &nodes() const { return nodes_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return step_; }

 private:
  struct Splines;
  PhysicalSetup setup_;
  double lo_, hi_, step_;
  std::vector<HubbardParams> nodes_;
  std::shared_ptr<const Splines> splines_;
};

}  // namespace spinsq
