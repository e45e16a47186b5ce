#include "spinsq/units.hpp"

#include <cmath>
#include <numbers>

#include "spinsq/error.hpp"

namespace spinsq {

using std::numbers::pi;

double PhysicalSetup::wavenumber() const { return 2.0 * pi / wavelength; }

double PhysicalSetup::period() const { return 0.5 * wavelength; }

double PhysicalSetup::recoil_energy() const {
  return 2.0 * pi * pi * constants.hbar * constants.hbar /
         (mass * wavelength * wavelength);
}

double PhysicalSetup::recoil_rate() const {
  return recoil_energy() / constants.hbar;
}

double PhysicalSetup::time_unit() const {
  const double combo = (a_aa + a_bb - 2.0 * a_ab) * constants.bohr;
  require(combo > 0.0, ErrorKind::Regime,
          "time unit requires a_aa + a_bb - 2 a_ab > 0 (phase-mixed regime)");
  return wavelength / (combo * recoil_rate());
}

// g = 4 pi hbar^2 a / m and hbar^2/m = E_R lambda^2 / (2 pi^2); with x measured
// in units of 1/k the 3D moment picks up k^3, which collapses to
// U / E_R = 16 pi^2 (a / lambda) (int w^4 dx)^3.
double PhysicalSetup::interaction_scale(double a_bohr) const {
  return 16.0 * pi * pi * a_bohr * constants.bohr / wavelength;
}

void PhysicalSetup::validate() const {
  require(mass > 0.0, ErrorKind::Config, "setup: mass must be positive");
  require(wavelength > 0.0, ErrorKind::Config,
          "setup: wavelength must be positive");
  require(constants.hbar > 0.0 && constants.bohr > 0.0, ErrorKind::Config,
          "setup: constants must be positive");
  require(coordination > 0, ErrorKind::Config,
          "setup: coordination must be positive");
  require(a_aa >= 0.0 && a_bb >= 0.0 && a_ab >= 0.0, ErrorKind::Config,
          "setup: scattering lengths must be non-negative");
}

}  // namespace spinsq
