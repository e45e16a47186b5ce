#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinsq/bogoliubov.hpp"
#include "spinsq/error.hpp"

using namespace spinsq;
using std::numbers::pi;

namespace {

HubbardParams couplings(double J, double Ua, double Ub, double Uab) {
  HubbardParams p;
  p.depth = 5.0;
  p.J = J;
  p.U_aa = Ua;
  p.U_bb = Ub;
  p.U_ab = Uab;
  return p;
}

const Eigen::Vector3d probe(0.7, 0.2, 0.0);

}  // namespace

TEST_CASE("decoupled species give single-component branches") {
  const auto p = couplings(0.05, 0.4, 0.3, 0.0);
  const double gap = free_gap(p.J, probe);
  const auto r = frequency_ratio(p, 0.5, 0.5, gap);
  CHECK(r.plus == doctest::Approx(std::sqrt(1.0 + 2.0 * 0.4 * 0.5 / gap)).epsilon(1e-14));
  CHECK(r.minus == doctest::Approx(std::sqrt(1.0 + 2.0 * 0.3 * 0.5 / gap)).epsilon(1e-14));
}

TEST_CASE("symmetric mixture splits into density and spin branches") {
  const double U = 0.4, Uab = 0.37, n = 0.5;
  const auto p = couplings(0.05, U, U, Uab);
  const double gap = free_gap(p.J, probe);
  const auto r = frequency_ratio(p, n, n, gap);
  CHECK(r.plus == doctest::Approx(std::sqrt(1.0 + 2.0 * (U + Uab) * n / gap)).epsilon(1e-14));
  CHECK(r.minus == doctest::Approx(std::sqrt(1.0 + 2.0 * (U - Uab) * n / gap)).epsilon(1e-14));
}

TEST_CASE("upper branch lies above the lower one") {
  const PhysicalSetup setup;
  for (double v : {2.0, 6.0, 12.0}) {
    const auto p = hubbard_params(setup, v);
    for (const auto &c : mode_classes(6)) {
      const auto w = spectrum(setup, p, 0.5, 0.5, c.ql);
      CHECK(w.plus >= w.minus);
      CHECK(w.minus > 0.0);
    }
  }
}

TEST_CASE("small-q slope of the spectrum is the sound velocity") {
  const PhysicalSetup setup;
  const auto p = hubbard_params(setup, 6.0);
  const auto c = sound_velocity(setup, p, 0.5, 0.5);
  const double ql = 1e-4;
  const auto w = spectrum(setup, p, 0.5, 0.5, Eigen::Vector3d(ql, 0, 0));
  const double q = ql / setup.period();
  CHECK(w.plus / q == doctest::Approx(c.plus).epsilon(1e-6));
  CHECK(w.minus / q == doctest::Approx(c.minus).epsilon(1e-6));
}

TEST_CASE("free gap is even and periodic in q") {
  const Eigen::Vector3d q(0.3, -1.1, 2.0);
  const double g = free_gap(0.07, q);
  CHECK(free_gap(0.07, -q) == doctest::Approx(g).epsilon(1e-15));
  CHECK(free_gap(0.07, q + Eigen::Vector3d(2 * pi, 0, -2 * pi)) == doctest::Approx(g).epsilon(1e-13));
  CHECK(free_gap(0.07, Eigen::Vector3d::Zero()) == 0.0);
  CHECK_THROWS_AS(frequency_ratio(couplings(0.07, 0.4, 0.4, 0.3), 0.5, 0.5, 0.0), Error);
}

TEST_CASE("demixing couplings are a regime error") {
  const auto p = couplings(0.05, 0.3, 0.3, 0.5);
  try {
    frequency_ratio(p, 0.5, 0.5, free_gap(p.J, Eigen::Vector3d(0.1, 0, 0)));
    FAIL("expected a regime error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Regime);
  }
  CHECK_THROWS_AS(sound_velocity(PhysicalSetup{}, p, 0.5, 0.5), Error);
}

TEST_CASE("mode classes partition the nonzero momenta") {
  for (int L = 2; L <= 10; ++L) {
    int total = 0;
    for (const auto &c : mode_classes(L)) total += c.multiplicity;
    CHECK(total == L * L * L - 1);
  }
  CHECK(mode_classes(2).size() == 3);
  CHECK(cube_side(1000) == 10);
  CHECK(cube_side(125) == 5);
  CHECK_THROWS_AS(cube_side(4), Error);
}

TEST_CASE("undriven mode stays in its ground state") {
  auto rates = [](double) { return std::pair{3.0e3, 0.0}; };
  const auto m = integrate_mode(rates, 0.0, 0.02);
  CHECK(std::norm(m.B) == 0.0);
  CHECK(std::abs(std::abs(m.A) - 1.0) < 1e-12);
  CHECK(std::arg(m.A) == doctest::Approx(std::remainder(-3.0e3 * 0.02, 2 * pi)).epsilon(1e-8));
}

TEST_CASE("pure squeeze drive gives the hyperbolic solution") {
  // w = 0, constant W: A = cosh(W t), B = -sinh(W t)
  const double W = 40.0, t = 0.02;
  auto rates = [W](double) { return std::pair{0.0, W}; };
  const auto m = integrate_mode(rates, 0.0, t);
  CHECK(m.A.real() == doctest::Approx(std::cosh(W * t)).epsilon(1e-9));
  CHECK(m.B.real() == doctest::Approx(-std::sinh(W * t)).epsilon(1e-9));
  CHECK(m.max_drift < 1e-12);
}

TEST_CASE("integration keeps the SU(1,1) norm") {
  auto rates = [](double t) { return std::pair{2e3 * (1.0 + t * 50.0), 30.0 * std::sin(300.0 * t)}; };
  const auto m = integrate_mode(rates, 0.0, 0.05);
  CHECK(m.max_drift < 1e-8);
  CHECK(std::abs(std::norm(m.A) - std::norm(m.B) - 1.0) < 1e-8);
}

TEST_CASE("ramp-driven excitations") {
  const PhysicalSetup setup;
  const double v_init = 2.0, v_c = 13.0;
  const DepthTable table(setup, v_init, v_c, 161);
  const double step = table.spacing();

  SUBCASE("halving the ramp time doubles the drive") {
    const RampSchedule slow{v_init, v_c, 0.1, 0.0}, fast{v_init, v_c, 0.05, 0.0};
    const Eigen::Vector3d ql(2 * pi / 10, 0, 0);
    for (double f : {0.0, 0.3, 0.8}) {
      const auto a = drive_rate(table, slow, 0.5, 0.5, ql, f * 0.1, step);
      const auto b = drive_rate(table, fast, 0.5, 0.5, ql, f * 0.05, step);
      CHECK(b.plus == doctest::Approx(2.0 * a.plus).epsilon(1e-12));
      CHECK(b.minus == doctest::Approx(2.0 * a.minus).epsilon(1e-12));
    }
  }

  SUBCASE("sudden quench projects onto the new modes") {
    const RampSchedule quench{v_init, v_c, 1e-9, 0.0};
    const auto ex = excitation_fraction(setup, 125, quench, table, 0.5, 0.5, step);
    for (std::size_t c = 0; c < ex.classes.size(); ++c) {
      const Eigen::Vector3d ql = ex.classes[c].ql;
      const auto pa = table.at(v_init), pf = table.at(v_c);
      const auto ri = frequency_ratio(pa, 0.5, 0.5, free_gap(pa.J, ql));
      const auto rf = frequency_ratio(pf, 0.5, 0.5, free_gap(pf.J, ql));
      // rho = dE / hbar w = 1 / ratio
      const double bp = std::pow(std::sinh(0.5 * std::log(rf.plus / ri.plus)), 2);
      const double bm = std::pow(std::sinh(0.5 * std::log(rf.minus / ri.minus)), 2);
      CHECK(ex.excited_plus[c] == doctest::Approx(bp).epsilon(2e-3));
      CHECK(ex.excited_minus[c] == doctest::Approx(bm).epsilon(2e-3));
    }
    CHECK(ex.max_drift < 1e-8);
  }

  SUBCASE("excitation falls with ramp time and is small well past t_adiab") {
    std::vector<HubbardParams> grid;
    for (int k = 0; k <= 110; ++k) grid.push_back(table.at(v_init + 0.1 * k));
    const auto times = adiabatic_time(setup, 1000, grid, v_init, v_c);
    REQUIRE(times.minus > 0.0);
    double prev = 1e9;
    for (double factor : {0.3, 1.0, 3.0, 10.0}) {
      const RampSchedule ramp{v_init, v_c, factor * times.minus, 0.0};
      const auto ex = excitation_fraction(setup, 1000, ramp, table, 0.5, 0.5, step);
      CHECK(ex.total_fraction < prev);
      CHECK(ex.max_drift < 1e-8);
      prev = ex.total_fraction;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("adiabatic time scales") {
  const PhysicalSetup setup;
  std::vector<HubbardParams> grid;
  for (int k = 0; k <= 110; ++k) grid.push_back(hubbard_params(setup, 2.0 + 0.1 * k));
  const auto small = adiabatic_time(setup, 1000, grid, 2.0, 13.0);
  const auto large = adiabatic_time(setup, 8000, grid, 2.0, 13.0);
  CHECK(small.minus >= small.plus);
  CHECK(large.asymptotic_minus == doctest::Approx(2.0 * small.asymptotic_minus).epsilon(1e-12));
  CHECK(large.asymptotic_plus == doctest::Approx(2.0 * small.asymptotic_plus).epsilon(1e-12));
  CHECK(small.depth_minus >= 2.0);
  CHECK(small.depth_minus <= 13.0);
  CHECK_THROWS_AS(adiabatic_time(setup, 1000, grid, 13.0, 2.0), Error);
}
