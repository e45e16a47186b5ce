#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "spinsq/error.hpp"
#include "spinsq/gutzwiller.hpp"
#include "spinsq/lattice.hpp"

using namespace spinsq;

namespace {

HubbardParams hand_params(double J, double U, double U_ab) {
  HubbardParams p;
  p.depth = 10.0;
  p.J = J;
  p.U_aa = U;
  p.U_bb = U;
  p.U_ab = U_ab;
  return p;
}

// Self-consistent single-site mean field on the square basis na, nb <= n,
// symmetric fillings (1/2, 1/2). Diagonalizes
//   H = -zJ phi sum_s (a_s + a_s^+) + U/2 sum_s n_s(n_s-1) + U_ab na nb - mu (na+nb)
// with mu bisected to unit total filling and phi iterated to <a>.
double mean_field_energy(const HubbardParams &p, int z, int n) {
  const int d = (n + 1) * (n + 1);
  auto at = [n](int na, int nb) { return na * (n + 1) + nb; };
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(d, d), onsite = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd count(d);
  for (int na = 0; na <= n; ++na)
    for (int nb = 0; nb <= n; ++nb) {
      const int i = at(na, nb);
      count(i) = na + nb;
      onsite(i, i) = 0.5 * p.U_aa * na * (na - 1) + 0.5 * p.U_bb * nb * (nb - 1) +
                     p.U_ab * na * nb;
      if (na < n) hop(at(na + 1, nb), i) = hop(i, at(na + 1, nb)) = std::sqrt(na + 1.0);
      if (nb < n) hop(at(na, nb + 1), i) = hop(i, at(na, nb + 1)) = std::sqrt(nb + 1.0);
    }
  auto ground = [&](double phi, double mu) {
    Eigen::MatrixXd h = onsite - z * p.J * phi * hop;
    h.diagonal() -= mu * count;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return Eigen::VectorXd(es.eigenvectors().col(0));
  };
  double phi = 0.5, mu = 0.0;
  Eigen::VectorXd g;
  for (int it = 0; it < 400; ++it) {
    double lo = -p.U_aa - 10 * p.J * z, hi = 2 * p.U_aa + 10 * p.J * z;
    for (int b = 0; b < 60; ++b) {
      mu = 0.5 * (lo + hi);
      g = ground(phi, mu);
      (g.dot(count.cwiseProduct(g)) < 1.0 ? lo : hi) = mu;
    }
    // <a_a> is half of <hop> for the symmetric state
    const double next = 0.25 * std::abs(g.dot(hop * g));
    if (std::abs(next - phi) < 1e-14) break;
    phi = next;
  }
  return g.dot(onsite * g) - 2.0 * z * p.J * phi * phi;
}

}  // namespace

TEST_CASE("zero hopping: Mott energies are exact") {
  const auto p = hand_params(0.0, 0.4, 0.38);
  const auto half = minimize(p, 6, 0.5, 0.5);
  CHECK(std::abs(half.energy) < 1e-10);
  const auto full = minimize(p, 6, 1.0, 1.0);
  CHECK(std::abs(full.energy - p.U_ab) < 1e-10);
}

TEST_CASE("zero interaction: condensate energy -zJ") {
  const auto p = hand_params(0.05, 0.0, 0.0);
  const auto s = minimize(p, 6, 0.5, 0.5);
  CHECK(s.energy == doctest::Approx(-6 * 0.05).epsilon(1e-8));
  const auto obs = observables(s);
  REQUIRE(obs.g2_aa);
  REQUIRE(obs.g2_ab);
  CHECK(std::abs(*obs.g2_aa - 1.0) < 1e-6);
  CHECK(std::abs(*obs.g2_ab - 1.0) < 1e-6);
  CHECK(std::abs(*obs.g3_a - 1.0) < 1e-6);
}

TEST_CASE("pair correlation of a hand-built Fock state") {
  GutzwillerState s;
  s.n_max = 12;
  s.amplitudes = Eigen::VectorXd::Zero(fock_dimension(12));
  s.amplitudes(fock_index(12, 2, 0)) = 1.0;
  const auto obs = observables(s);
  REQUIRE(obs.g2_aa);
  CHECK(*obs.g2_aa == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*obs.g3_a == doctest::Approx(0.0));
  CHECK_FALSE(obs.g2_bb);
  CHECK_FALSE(obs.g2_ab);
  CHECK(obs.var_total == doctest::Approx(0.0));
}

TEST_CASE("triangular basis layout") {
  CHECK(fock_dimension(12) == 91);
  CHECK(fock_index(12, 0, 0) == 0);
  CHECK(fock_index(12, 12, 0) == 90);
}

TEST_CASE("deep lattice is a Mott state with vanishing doublons") {
  const auto p = hubbard_params(PhysicalSetup{}, 20.0);
  const auto s = minimize(p, 6, 0.5, 0.5);
  const auto obs = observables(s);
  CHECK(obs.phi_a < 1e-8);
  CHECK(*obs.g2_aa < 1e-12);
  CHECK(*obs.g2_ab < 1e-12);
  CHECK(obs.var_total < 1e-6);
}

TEST_CASE("energy agrees with a square-basis self-consistent mean field") {
  const PhysicalSetup setup;
  const int N = 8;
  for (double depth : {4.0, 6.0, 9.0}) {
    const auto p = hubbard_params(setup, depth);
    const double oracle = mean_field_energy(p, setup.coordination, 8);
    const auto s = minimize(p, setup.coordination, 0.5, 0.5);
    CAPTURE(depth);
    CHECK(std::abs(N * s.energy - N * oracle) < 1e-6);
  }
}

TEST_CASE("cutoff 12 is converged against 14") {
  const auto p = hubbard_params(PhysicalSetup{}, 4.0);
  GutzwillerOptions wide;
  wide.n_max = 14;
  for (double fa : {0.3, 0.5}) {
    const auto a = minimize(p, 6, fa, 1.0 - fa);
    const auto b = minimize(p, 6, fa, 1.0 - fa, wide);
    CHECK(std::abs(a.energy - b.energy) < 1e-8);
  }
}

TEST_CASE("recorded energies descend") {
  GutzwillerOptions o;
  o.record_history = true;
  const auto p = hubbard_params(PhysicalSetup{}, 8.0);
  const auto s = minimize(p, 6, 0.45, 0.55, o);
  REQUIRE(s.energy_history.size() > 2);
  for (std::size_t i = 1; i < s.energy_history.size(); ++i)
    CHECK(s.energy_history[i] <= s.energy_history[i - 1] + 1e-12);
  CHECK(s.gradient_norm <= o.tol);
}

TEST_CASE("fillings are held at the requested values") {
  const auto p = hubbard_params(PhysicalSetup{}, 6.0);
  const auto s = minimize(p, 6, 0.37, 0.63);
  const auto obs = observables(s);
  CHECK(std::abs(obs.mean_a - 0.37) < 1e-10);
  CHECK(std::abs(obs.mean_b - 0.63) < 1e-10);
}

TEST_CASE("number fluctuations shrink with depth and vanish past V_c") {
  const PhysicalSetup setup;
  double prev = 1e9;
  for (double v : {3.0, 6.0, 9.0, 12.0}) {
    const auto obs = observables(minimize(hubbard_params(setup, v), 6, 0.5, 0.5));
    CHECK(obs.var_total < prev);
    prev = obs.var_total;
  }
  const auto past = observables(minimize(hubbard_params(setup, 14.0), 6, 0.5, 0.5));
  CHECK(past.var_total < 1e-6);
}

TEST_CASE("single-component transition at the Gutzwiller value") {
  const PhysicalSetup setup;
  const double vc = find_vc(setup, 1.0, 0.0, 1e-4, {}, {}, 2.0, 40.0);
  const auto p = hubbard_params(setup, vc);
  const double ratio = p.U_aa / (setup.coordination * p.J);
  CHECK(ratio == doctest::Approx(std::pow(1.0 + std::sqrt(2.0), 2)).epsilon(0.02));

  SUBCASE("two components at half filling each order later") {
    const double vc2 = find_vc(setup, 0.5, 0.5, 1e-4, {}, {}, 2.0, 40.0);
    CHECK(vc2 > vc);
  }
}

TEST_CASE("bisection result moves less than the tolerance when it is halved") {
  const PhysicalSetup setup;
  const double coarse = find_vc(setup, 0.5, 0.5, 1e-2, {}, {}, 2.0, 40.0);
  const double fine = find_vc(setup, 0.5, 0.5, 5e-3, {}, {}, 2.0, 40.0);
  CHECK(std::abs(coarse - fine) <= 1e-2);
  CHECK_THROWS_AS(find_vc(setup, 0.6, 0.6, 1e-3), Error);
}

TEST_CASE("surface is symmetric under exchanging the species") {
  const PhysicalSetup setup;
  const int N = 16;
  std::vector<double> atoms;
  for (int n = 4; n <= 12; ++n) atoms.push_back(n);
  Eigen::VectorXd depths(2);
  depths << 4.0, 9.0;
  const auto surf = energy_surface(setup, N, atoms, depths);
  for (std::size_t r = 0; r < atoms.size(); ++r) {
    const auto mirror = surf.row(N - atoms[r]);
    REQUIRE(mirror);
    for (Eigen::Index k = 0; k < depths.size(); ++k) {
      const double e = surf.cell(r, k).total_energy, m = surf.cell(*mirror, k).total_energy;
      CHECK(std::abs(e - m) <= 1e-8 * std::abs(e));
      CHECK(surf.cell(r, k).g2_aa == doctest::Approx(surf.cell(*mirror, k).g2_bb).epsilon(1e-6));
    }
  }

  SUBCASE("cells are independent of the worker count") {
    const auto threaded = energy_surface(setup, N, atoms, depths, {}, {}, 3);
    for (std::size_t i = 0; i < surf.cells.size(); ++i)
      CHECK(threaded.cells[i].total_energy == surf.cells[i].total_energy);
  }
}

TEST_CASE("spin curvature falls to zero at the transition") {
  const PhysicalSetup setup;
  const int N = 125;
  const double mid = spin_curvature(hubbard_params(setup, 7.0), 6, N).second_difference;
  const double near = spin_curvature(hubbard_params(setup, 12.9), 6, N).second_difference;
  const double past = spin_curvature(hubbard_params(setup, 14.0), 6, N).second_difference;
  CHECK(mid > 0.0);
  CHECK(near < 0.3 * mid);
  CHECK(std::abs(past) < 1e-8 * mid);
}

TEST_CASE("invalid fillings are domain errors") {
  const auto p = hubbard_params(PhysicalSetup{}, 6.0);
  for (auto [fa, fb] : {std::pair{-0.1, 0.5}, std::pair{0.0, 0.0}, std::pair{4.0, 3.0}}) {
    try {
      minimize(p, 6, fa, fb);
      FAIL("expected a domain error");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
}

TEST_CASE("a failing surface cell is named in the error") {
  GutzwillerOptions o;
  o.tail_tol = 1e-300;
  Eigen::VectorXd depths(1);
  depths << 3.0;
  try {
    energy_surface(PhysicalSetup{}, 10, {4.0, 5.0}, depths, {}, o);
    FAIL("expected a truncation error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Accuracy);
    CHECK(std::string(e.what()).find("surface cell (Na=4") != std::string::npos);
  }
}
