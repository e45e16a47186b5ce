#pragma once

// Two-component on-site Gutzwiller mean field at fixed mean fillings.
//
// The on-site state is sum c_{na,nb} |na, nb> over the triangular Fock
// truncation na + nb <= n_max. The energy per site
//   e = -z J (phi_a^2 + phi_b^2) + <U_aa/2 na(na-1) + U_bb/2 nb(nb-1) + U_ab na nb>
// is minimized at fixed <na>, <nb>. Amplitudes are kept real (the minimizer
// can always be gauged real and non-negative with phi_a, phi_b >= 0).

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spinsq/lattice.hpp"
#include "spinsq/units.hpp"

namespace spinsq {

struct GutzwillerOptions {
  int n_max = 12;             // total on-site occupation cutoff
  double tol = 1e-11;         // projected-gradient norm at convergence (E_R)
  int max_iter = 4000;
  std::uint64_t seed = 0;     // multi-start seeding
  int random_starts = 2;      // extra randomized cold starts
  double tail_tol = 1e-8;     // allowed weight on the na + nb = n_max shell
  double constraint_tol = 1e-10;
  bool record_history = false;
};

struct GutzwillerState {
  int n_max = 0;
  Eigen::VectorXd amplitudes;  // index via fock_index(n_max, na, nb)
  double fill_a = 0.0;
  double fill_b = 0.0;
  double phi_a = 0.0;
  double phi_b = 0.0;
  double energy = 0.0;  // per site, E_R
  double mu_a = 0.0;    // Lagrange multipliers d e / d n_sigma (E_R)
  double mu_b = 0.0;
  double gradient_norm = 0.0;
  double tail_weight = 0.0;
  int iterations = 0;
  std::vector<double> energy_history;  // filled when record_history is set
};

/// Position of |na, nb> in the triangular basis (na-major).
int fock_index(int n_max, int na, int nb);
int fock_dimension(int n_max);

/// Constrained minimizer. `warm` (same n_max) replaces the cold multi-start.
GutzwillerState minimize(const HubbardParams &params, int coordination,
                         double fill_a, double fill_b,
                         const GutzwillerOptions &options = {},
                         const GutzwillerState *warm = nullptr);

struct OnSiteObservables {
  std::optional<double> g2_aa, g2_bb, g2_ab, g3_a, g3_b;  // nullopt: <n> = 0
  double phi_a = 0.0, phi_b = 0.0;
  double mean_a = 0.0, mean_b = 0.0;
  double var_a = 0.0, var_b = 0.0, var_total = 0.0;
};

OnSiteObservables observables(const GutzwillerState &state);

/// Depth where both order parameters drop below the superfluid threshold,
/// by bisection on [lo, hi].
double find_vc(const PhysicalSetup &setup, double fill_a, double fill_b,
               double tol, const LatticeOptions &lattice = {},
               const GutzwillerOptions &options = {}, double lo = 0.0,
               double hi = 40.0, double threshold = 1e-8);

struct SurfaceCell {
  double energy_per_site = 0.0;
  double total_energy = 0.0;  // N * e, E_R
  double mu_a = 0.0, mu_b = 0.0;
  double g2_aa = 0.0, g2_bb = 0.0, g2_ab = 0.0, g3_a = 0.0, g3_b = 0.0;
  double phi2 = 0.0;  // |phi_a|^2 + |phi_b|^2
};

/// E0(Na, V0) = N e(Na/N, 1 - Na/N, V0) over a set of atom numbers (possibly
/// half-integer for the central cells of odd N) and a depth grid.
struct EnergySurface {
  int N = 0;
  std::vector<double> atom_numbers;  // strictly increasing
  Eigen::VectorXd depths;            // strictly increasing
  std::vector<SurfaceCell> cells;    // row-major: atom number, then depth

  const SurfaceCell &cell(std::size_t atom, Eigen::Index depth) const {
    return cells[atom * static_cast<std::size_t>(depths.size()) +
                 static_cast<std::size_t>(depth)];
  }
  /// Row of an atom number, or nullopt if not tabulated.
  std::optional<std::size_t> row(double atoms) const;
  double central_atoms() const { return 0.5 * N; }
};

/// Integer window plus the central cells N/2 and N/2 +- 1.
std::vector<double> surface_atom_numbers(int N, int lo, int hi);

EnergySurface energy_surface(const PhysicalSetup &setup, int N,
                             std::vector<double> atom_numbers,
                             std::span<const HubbardParams> params_by_depth,
                             const GutzwillerOptions &options = {},
                             int jobs = 1);

EnergySurface energy_surface(const PhysicalSetup &setup, int N,
                             std::vector<double> atom_numbers,
                             const Eigen::VectorXd &depths,
                             const LatticeOptions &lattice = {},
                             const GutzwillerOptions &options = {},
                             int jobs = 1);

struct SpinCurvature {
  double second_difference = 0.0;  // E0(N/2+1) - 2 E0(N/2) + E0(N/2-1), E_R
  GutzwillerState center;
};

/// One-atom-transfer second difference of E0 at the symmetric point, from
/// Gauss-Legendre quadrature of the chemical-potential difference
///   E0(+1) + E0(-1) - 2 E0(0) = N int_0^{1/N} [D(d) - D(-d)] dd,
/// D = mu_a - mu_b at fillings (1/2 + d, 1/2 - d). Avoids the cancellation
/// of extensive energies that limits direct differencing at large N.
SpinCurvature spin_curvature(const HubbardParams &params, int coordination,
                             int N, const GutzwillerOptions &options = {},
                             const GutzwillerState *warm = nullptr);

}  // namespace spinsq
