#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "spinsq/error.hpp"
#include "spinsq/squeeze.hpp"

using namespace spinsq;
using std::numbers::pi;

namespace {

using Cd = std::complex<double>;

// Dense spin-N/2 operators in the |m> basis, m = -N/2 .. N/2.
struct DenseSpin {
  Eigen::MatrixXcd x, y, z;
};

DenseSpin dense_spin(int N) {
  const int d = N + 1;
  const double j = 0.5 * N;
  Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(d, d);
  DenseSpin s;
  s.z = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = k - j;
    s.z(k, k) = m;
    if (k + 1 < d) up(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  s.x = 0.5 * (up + up.adjoint());
  s.y = Cd(0, -0.5) * (up - up.adjoint());
  return s;
}

// Wineland parameter from the full 3x3 covariance of a dense state vector.
double dense_xi2(int N, const Eigen::VectorXcd &psi) {
  const auto s = dense_spin(N);
  const Eigen::MatrixXcd *ops[3] = {&s.x, &s.y, &s.z};
  Eigen::Vector3d mean;
  for (int a = 0; a < 3; ++a) mean(a) = psi.dot(*ops[a] * psi).real();
  Eigen::Matrix3d cov;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Eigen::MatrixXcd anti = *ops[a] * *ops[b] + *ops[b] * *ops[a];
      cov(a, b) = 0.5 * psi.dot(anti * psi).real() - mean(a) * mean(b);
    }
  const Eigen::Vector3d u = mean.normalized();
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - u * u.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(proj * cov * proj);
  // one eigenvalue is the (zero) component along u; take the smaller of the other two
  double vmin = 1e300;
  for (int i = 0; i < 3; ++i)
    if (std::abs(es.eigenvectors().col(i).dot(u)) < 0.5) vmin = std::min(vmin, es.eigenvalues()(i));
  return N * vmin / mean.squaredNorm();
}

Eigen::VectorXcd dense_state(const SpinAmplitudes &a) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(a.N + 1);
  for (std::size_t k = 0; k < a.d.size(); ++k) psi(a.window.lo + static_cast<int>(k)) = a.d[k];
  return psi;
}

Eigen::VectorXd phases(const FockWindow &w, const std::function<double(int)> &f) {
  Eigen::VectorXd p(w.hi - w.lo + 1);
  for (int na = w.lo; na <= w.hi; ++na) p(na - w.lo) = f(na);
  return p;
}

// Surface with every Fock row from 0 to N and total energies f(Na, V0).
EnergySurface synthetic_surface(int N, Eigen::VectorXd depths,
                                const std::function<double(double, double)> &f) {
  EnergySurface s;
  s.N = N;
  s.depths = std::move(depths);
  for (int n = 0; n <= N; ++n) s.atom_numbers.push_back(n);
  for (double na : s.atom_numbers)
    for (Eigen::Index k = 0; k < s.depths.size(); ++k) {
      SurfaceCell c;
      c.total_energy = f(na, s.depths(k));
      s.cells.push_back(c);
    }
  return s;
}

Eigen::VectorXd two_depths(double lo, double hi) {
  Eigen::VectorXd d(2);
  d << lo, hi;
  return d;
}

}  // namespace

TEST_CASE("coherent spin state has unit squeezing") {
  for (int N : {10, 125, 1000}) {
    const auto w = fock_window(N);
    const auto a = make_amplitudes(N, w, Eigen::VectorXd::Zero(w.hi - w.lo + 1));
    const auto m = spin_moments(a);
    CHECK(m.sx == doctest::Approx(0.5 * N).epsilon(1e-12));
    CHECK(std::abs(m.sy) < 1e-12 * N);
    CHECK(std::abs(m.sz) < 1e-12 * N);
    CHECK(std::abs(xi_squared(m).xi2 - 1.0) < 1e-8);
  }
}

TEST_CASE("phase pi per atom flips the mean spin") {
  const int N = 40;
  const auto w = fock_window(N);
  const auto a = make_amplitudes(N, w, phases(w, [](int na) { return pi * na; }));
  const auto m = spin_moments(a);
  CHECK(m.sx == doctest::Approx(-0.5 * N).epsilon(1e-12));
  CHECK(std::abs(xi_squared(m).xi2 - 1.0) < 1e-8);
}

TEST_CASE("moments and squeezing match dense spin matrices") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  for (int N : {6, 13, 24}) {
    const auto w = fock_window(N);
    REQUIRE(w.lo == 0);
    REQUIRE(w.hi == N);
    for (double chi_t : {0.02, 0.1, 0.3}) {
      const auto a = make_amplitudes(N, w, phases(w, [&](int na) {
        const double m = na - 0.5 * N;
        return chi_t * m * m + 0.2 * m + noise(rng);
      }));
      const auto psi = dense_state(a);
      const auto s = dense_spin(N);
      const auto m = spin_moments(a);
      CHECK(std::abs(m.sx - psi.dot(s.x * psi).real()) < 1e-10);
      CHECK(std::abs(m.sy - psi.dot(s.y * psi).real()) < 1e-10);
      CHECK(std::abs(m.sz - psi.dot(s.z * psi).real()) < 1e-10);
      CHECK(std::abs(xi_squared(m).xi2 - dense_xi2(N, psi)) < 1e-10);
    }
  }
}

TEST_CASE("long-double and double moments agree") {
  const int N = 200;
  auto phase = [](int na) { return 0.01 * (na - 100.0) * (na - 100.0); };
  const auto d = phased_binomial<double>(N, 0, N, phase);
  const auto l = phased_binomial<long double>(N, 0, N, phase);
  const auto xd = xi_squared(spin_moments<double>(N, 0, d)).xi2;
  const auto xl = xi_squared(spin_moments<long double>(N, 0, l)).xi2;
  CHECK(std::abs(xd - static_cast<double>(xl)) < 1e-12);
}

TEST_CASE("one-axis twisting contrast follows cos^(N-1)") {
  const int N = 125;
  const auto w = fock_window(N);
  for (double T : {0.0, 0.01, 0.05, 0.2}) {
    const auto a = make_amplitudes(N, w, phases(w, [&](int na) {
      const double m = na - 0.5 * N;
      return T * m * m;
    }));
    const auto m = spin_moments(a);
    CHECK(std::abs(m.sx - 0.5 * N * std::pow(std::cos(T), N - 1)) < 1e-10);
    // symmetric phases about N/2 keep the mean spin on the x axis
    CHECK(std::abs(m.sy) < 1e-10);
    CHECK(std::abs(m.sz) < 1e-10);
  }
}

TEST_CASE("Fock window covers ten standard deviations") {
  const auto small = fock_window(4);
  CHECK(small.lo == 0);
  CHECK(small.hi == 4);
  CHECK(small.tail_mass == 0.0);
  const auto big = fock_window(10000);
  CHECK(big.lo == 4500);
  CHECK(big.hi == 5500);
  CHECK(big.tail_mass > 0.0);
  CHECK(big.tail_mass < 1e-20);
}

TEST_CASE("binomial amplitudes are normalized up to the window tail") {
  for (int N : {125, 1000, 100000}) {
    const auto w = fock_window(N);
    const auto a = make_amplitudes(N, w, Eigen::VectorXd::Zero(w.hi - w.lo + 1));
    double norm = 0.0;
    for (const auto &c : a.d) norm += std::norm(c);
    // lgamma rounding grows with N
    CHECK(std::abs(norm + w.tail_mass - 1.0) < 1e-14 * N + 1e-13);
  }
}

TEST_CASE("phase vector must match the window") {
  const auto w = fock_window(20);
  CHECK_THROWS_AS(make_amplitudes(20, w, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("a flat surface leaves the coherent state untouched") {
  const PhysicalSetup setup;
  const RampSchedule ramp{2.0, 12.0, 0.05, 0.0};
  const auto surf = synthetic_surface(40, two_depths(2.0, 12.0), [](double, double) { return 3.0; });
  for (double t : {0.0, 0.01, 0.05}) {
    const auto sq = xi_squared(spin_moments(evolve_phases(setup, surf, ramp, t)));
    CHECK(std::abs(sq.xi2 - 1.0) < 1e-12);
  }
}

TEST_CASE("quadratic surface accumulates the ramp integral of its curvature") {
  const PhysicalSetup setup;
  const int N = 60;
  const RampSchedule ramp{2.0, 12.0, 0.04, 0.0};
  // E(Na, V) = (a + b V) m^2: the phase is rate * m^2 * int (a + b V) dV / slope
  const double a = 2e-4, b = 1e-5;
  const auto surf = synthetic_surface(N, two_depths(2.0, 12.0), [&](double na, double v) {
    const double m = na - 0.5 * N;
    return (a + b * v) * m * m;
  });
  const PhaseIntegrator integ(setup, surf, ramp);
  for (double t : {0.0, 0.013, 0.04}) {
    const double v = ramp_at(ramp, t);
    const double twist = setup.recoil_rate() / ramp.slope() *
                         (a * (v - 2.0) + 0.5 * b * (v * v - 4.0));
    const auto expect = make_amplitudes(N, integ.window(), phases(integ.window(), [&](int na) {
      const double m = na - 0.5 * N;
      return twist * m * m;
    }));
    const auto got = integ.at(t);
    for (std::size_t k = 0; k < got.d.size(); ++k) CHECK(std::abs(got.d[k] - expect.d[k]) < 1e-9);
    CHECK(spin_moments(got).sx ==
          doctest::Approx(0.5 * N * std::pow(std::cos(twist), N - 1)).epsilon(1e-9));
  }
}

TEST_CASE("doubling the sampling reproduces the shared samples exactly") {
  const PhysicalSetup setup;
  const int N = 60;
  const RampSchedule ramp{2.0, 12.0, 0.04, 0.05};
  const auto surf = synthetic_surface(N, two_depths(2.0, 20.0), [&](double na, double v) {
    const double m = na - 0.5 * N;
    return 3e-6 * (20.0 - v) * m * m;
  });
  const auto coarse = squeeze_trajectory(setup, surf, ramp, 50);
  const auto fine = squeeze_trajectory(setup, surf, ramp, 100, 2);
  for (std::size_t j = 0; j < coarse.t.size(); ++j) {
    CHECK(coarse.t[j] == fine.t[2 * j]);
    CHECK(coarse.xi2[j] == fine.xi2[2 * j]);
  }
  CHECK(fine.xi2_min <= coarse.xi2_min + 1e-12);
  CHECK(coarse.xi2.front() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("surfaces that cannot serve the window or the ramp are rejected") {
  const PhysicalSetup setup;
  const RampSchedule ramp{2.0, 12.0, 0.04, 0.0};
  auto flat = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(PhaseIntegrator(setup, synthetic_surface(40, two_depths(3.0, 12.0), flat), ramp),
                  Error);
  auto holed = synthetic_surface(40, two_depths(2.0, 12.0), flat);
  holed.atom_numbers.erase(holed.atom_numbers.begin() + 5);
  holed.cells.erase(holed.cells.begin() + 10, holed.cells.begin() + 12);
  CHECK_THROWS_AS(PhaseIntegrator(setup, holed, ramp), Error);
  try {
    PhaseIntegrator(setup, synthetic_surface(40, two_depths(2.0, 12.0), flat), ramp, 0.0);
    // N = 40 has an empty tail, so a zero threshold is allowed
  } catch (const Error &) {
    FAIL("unexpected rejection");
  }
}
