#pragma once

// Physical constants and the species/lattice setup. All energies inside the
// library are in units of the recoil energy E_R; times are in seconds.

namespace spinsq {

struct Constants {
  double hbar = 1.054571817e-34;     // J s
  double bohr = 5.29177210903e-11;   // m
  double amu = 1.66053906660e-27;    // kg
};

struct PhysicalSetup {
  Constants constants{};
  double mass = 86.909 * 1.66053906660e-27;  // kg, 87Rb
  double wavelength = 830e-9;                // m
  double a_aa = 100.4;                       // scattering lengths in Bohr radii
  double a_bb = 100.4;
  double a_ab = 95.0;
  int coordination = 6;  // simple cubic lattice

  double wavenumber() const;  // k = 2 pi / lambda
  double period() const;      // l = lambda / 2
  double recoil_energy() const;
  double recoil_rate() const;  // E_R / hbar in s^-1

  /// t_unit from (a_aa + a_bb - 2 a_ab) E_R / (hbar lambda); requires the
  /// phase-mixed sign of the coupling combination.
  double time_unit() const;

  /// U / E_R per unit of the dimensionless Wannier moment (int w^4 dx)^3,
  /// for a scattering length given in Bohr radii.
  double interaction_scale(double a_bohr) const;

  void validate() const;
};

}  // namespace spinsq
