#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "spinsq/error.hpp"
#include "spinsq/lattice.hpp"
#include "spinsq/units.hpp"

using namespace spinsq;
using std::numbers::pi;

namespace {

// Lowest Bloch eigenvalue of -d^2/dx^2 + V0 sin^2 x on one period [0, pi)
// from a fourth-order finite-difference stencil with Bloch-twisted wrap.
// Independent of the plane-wave construction used by the library.
double finite_difference_band(double depth, double q, int n) {
  const double h = pi / n;
  const std::complex<double> twist = std::polar(1.0, q * pi);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  const double c[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int i = 0; i < n; ++i) {
    for (int o = -2; o <= 2; ++o) {
      int j = i + o;
      std::complex<double> f = 1.0;
      if (j < 0) j += n, f = std::conj(twist);
      if (j >= n) j -= n, f = twist;
      H(i, j) += -c[o + 2] / (h * h) * f;
    }
    const double s = std::sin(i * h);
    H(i, i) += depth * s * s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("free lattice band is the folded parabola") {
  const auto band = band_structure(0.0, 21, 16);
  for (Eigen::Index m = 0; m < band.q.size(); ++m)
    CHECK(band.energy(m) == doctest::Approx(band.q(m) * band.q(m)).epsilon(1e-12));
  CHECK(std::abs(band.energy(8)) < 1e-14);
}

TEST_CASE("band is even in q and minimal at zero") {
  for (double depth : {0.0, 3.0, 10.0, 25.0}) {
    const auto band = band_structure(depth, 25, 32, 1e-8);
    const auto n = band.q.size();
    for (Eigen::Index m = 0; m < n; ++m) {
      CHECK(band.q(m) == -band.q(n - 1 - m));
      CHECK(std::abs(band.energy(m) - band.energy(n - 1 - m)) <=
            1e-12 * std::max(1.0, std::abs(band.energy(m))));
      CHECK(band.energy(m) >= band.energy(n / 2) - 1e-14);
    }
  }
}

TEST_CASE("plane-wave cutoff 21 is converged at V0 = 10") {
  for (double q : {0.0, 0.25, 0.5, 1.0})
    CHECK(std::abs(lowest_band_energy(10.0, q, 21) - lowest_band_energy(10.0, q, 25)) < 1e-10);
}

TEST_CASE("too small a cutoff is reported as an accuracy error") {
  try {
    band_structure(40.0, 11, 8, 1e-12);
    FAIL("expected an accuracy error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Accuracy);
  }
  CHECK_THROWS_AS(band_structure(5.0, 12), Error);
}

TEST_CASE("hopping at V0 = 10 matches a finite-difference Mathieu band") {
  // oracle value frozen from finite_difference_band with n = 512
  constexpr double frozen_J = 0.019186709036777;
  const double oracle =
      0.25 * (finite_difference_band(10.0, 1.0, 256) - finite_difference_band(10.0, 0.0, 256));
  CHECK(oracle == doctest::Approx(frozen_J).epsilon(1e-6));
  const auto p = hubbard_params(PhysicalSetup{}, 10.0);
  CHECK(std::abs(p.J / frozen_J - 1.0) < 1e-3);
}

TEST_CASE("interaction ratios follow the scattering lengths") {
  PhysicalSetup s;
  s.a_aa = 100.4;
  s.a_bb = 100.4;
  s.a_ab = 95.0;
  for (double depth : {3.0, 12.0}) {
    const auto p = hubbard_params(s, depth);
    CHECK(p.U_ab / p.U_aa == doctest::Approx(95.0 / 100.4).epsilon(1e-15));
    CHECK(p.U_bb == p.U_aa);
  }
}

TEST_CASE("deeper lattice: smaller J, larger U and I3/I2") {
  const PhysicalSetup s;
  const auto a = hubbard_params(s, 20.0), b = hubbard_params(s, 30.0);
  CHECK(b.J < a.J);
  CHECK(b.U_aa > a.U_aa);
  CHECK(b.I2 > a.I2);
  CHECK(b.I3 / b.I2 > a.I3 / a.I2);
}

TEST_CASE("J decreases and I_m increase across the working range") {
  const PhysicalSetup s;
  HubbardParams prev = hubbard_params(s, 2.0);
  for (double v = 3.0; v <= 30.0; v += 1.0) {
    const auto p = hubbard_params(s, v);
    CHECK(p.J < prev.J);
    CHECK(p.I2 > prev.I2);
    CHECK(p.I3 > prev.I3);
    prev = p;
  }
}

TEST_CASE("Wannier function is real, normalized and centred") {
  LatticeOptions o;
  for (double depth : {2.0, 8.0, 20.0}) {
    const auto w = wannier_function(depth, o);
    CHECK(std::abs(w.raw_norm - 1.0) < 1e-8);
    CHECK(wannier_moment_1d(w, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(w.w(0) > 0.0);
    CHECK(w.w.cwiseAbs().maxCoeff() == doctest::Approx(w.w(0)));
  }
}

TEST_CASE("nearest-neighbour matrix element agrees with the bandwidth within 1%") {
  const LatticeOptions o;
  const PhysicalSetup s;
  for (double depth = 4.0; depth <= 30.0; depth += 2.0) {
    const double direct = nearest_neighbor_hopping(depth, o);
    const double bandwidth = hubbard_params(s, depth, o).J;
    CHECK(std::abs(direct / bandwidth - 1.0) < 0.01);
  }
}

TEST_CASE("3D Wannier integrals factorize into 1D cubes") {
  LatticeOptions o;
  o.points_per_site = 24;
  const PhysicalSetup s;
  const double depth = 10.0;
  const auto prof = wannier_function(depth, o);
  const auto p = hubbard_params(s, depth, o);
  // explicit triple trapezoid over +-3 sites (w^4 beyond is below 1e-16)
  const int half = 3 * o.points_per_site;
  std::vector<double> w4, w6;
  for (int i = -half; i <= half; ++i) {
    const double v = prof.w(std::abs(i));
    const double wt = (std::abs(i) == half ? 0.5 : 1.0) * prof.dx;
    w4.push_back(wt * std::pow(v, 4));
    w6.push_back(wt * std::pow(v, 6));
  }
  long double s4 = 0, s6 = 0;
  for (std::size_t i = 0; i < w4.size(); ++i)
    for (std::size_t j = 0; j < w4.size(); ++j)
      for (std::size_t k = 0; k < w4.size(); ++k) {
        s4 += static_cast<long double>(w4[i]) * w4[j] * w4[k];
        s6 += static_cast<long double>(w6[i]) * w6[j] * w6[k];
      }
  const double k3 = std::pow(s.wavenumber(), 3);
  CHECK(std::abs(static_cast<double>(s4) * k3 / p.I2 - 1.0) < 1e-10);
  CHECK(std::abs(static_cast<double>(s6) * k3 * k3 / p.I3 - 1.0) < 1e-10);
}

TEST_CASE("depth below the minimum is a domain error") {
  try {
    hubbard_params(PhysicalSetup{}, 1.0);
    FAIL("expected a domain error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("linear ramp endpoints and midpoint") {
  const RampSchedule r{2.0, 13.0, 0.05, 0.0};
  CHECK(ramp_at(r, 0.0) == 2.0);
  CHECK(ramp_at(r, 0.05) == 13.0);
  CHECK(ramp_at(r, 0.025) == doctest::Approx(7.5).epsilon(1e-15));
  CHECK_THROWS_AS(ramp_at(r, -1e-9), Error);
  CHECK_THROWS_AS(ramp_at(r, 0.0500001), Error);
  CHECK(ramp_time(r, 7.5) == doctest::Approx(0.025));
  const RampSchedule longer{2.0, 13.0, 0.05, 0.06};
  CHECK(ramp_at(longer, 0.06) == doctest::Approx(2.0 + 11.0 * 1.2));
}

TEST_CASE("time unit requires the phase-mixed coupling combination") {
  PhysicalSetup s;
  CHECK(s.time_unit() > 0.0);
  s.a_ab = 0.5 * (s.a_aa + s.a_bb);
  CHECK_THROWS_AS(s.time_unit(), Error);
  const PhysicalSetup d;
  CHECK(d.recoil_energy() ==
        doctest::Approx(2 * pi * pi * d.constants.hbar * d.constants.hbar /
                        (d.mass * d.wavelength * d.wavelength)));
  CHECK(d.period() == doctest::Approx(415e-9));
}

TEST_CASE("depth table interpolates the exact parameters") {
  const PhysicalSetup s;
  const DepthTable table(s, 2.0, 14.0, 97);
  for (double v : {2.0, 3.37, 7.71, 11.9, 14.0}) {
    const auto exact = hubbard_params(s, v), spl = table.at(v);
    CHECK(std::abs(spl.J / exact.J - 1.0) < 1e-5);
    CHECK(std::abs(spl.U_aa / exact.U_aa - 1.0) < 1e-6);
  }
  CHECK_THROWS_AS(table.at(15.0), Error);
}
