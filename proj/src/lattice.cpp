#include "spinsq/lattice.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/parallel.hpp"

namespace spinsq {

using std::numbers::pi;

namespace {

// Central equation in a symmetric plane-wave basis e^{i(q + 2j)x}:
// kinetic (q + 2j)^2, potential V0/2 on the diagonal and -V0/4 between j, j+1.
Eigen::MatrixXd central_equation(double depth, double q, int plane_waves) {
  const int half = plane_waves / 2;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(plane_waves, plane_waves);
  for (int i = 0; i < plane_waves; ++i) {
    const double p = q + 2.0 * (i - half);
    h(i, i) = p * p + 0.5 * depth;
    if (i + 1 < plane_waves) h(i, i + 1) = h(i + 1, i) = -0.25 * depth;
  }
  return h;
}

struct LowestState {
  double energy;
  Eigen::VectorXd coefficients;
};

LowestState lowest_state(double depth, double q, int plane_waves) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      central_equation(depth, q, plane_waves));
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "band eigen-solve failed at V0=" << depth << ", q=" << q;
    fail(ErrorKind::Convergence, msg.str());
  }
  Eigen::VectorXd c = es.eigenvectors().col(0);
  // psi_q(0) = sum_j c_j real and positive fixes the Bloch phase
  if (c.sum() < 0.0) c = -c;
  return {es.eigenvalues()(0), c};
}

void check_plane_waves(int plane_waves) {
  require(plane_waves >= 11 && plane_waves % 2 == 1, ErrorKind::Domain,
          "plane-wave cutoff must be odd and >= 11");
}

}  // namespace

double lowest_band_energy(double depth, double q, int plane_waves) {
  check_plane_waves(plane_waves);
  return lowest_state(depth, q, plane_waves).energy;
}

BandSamples band_structure(double depth, int plane_waves, int samples,
                           double tolerance) {
  require(depth >= 0.0, ErrorKind::Domain, "band structure needs V0 >= 0");
  check_plane_waves(plane_waves);
  require(samples >= 2 && samples % 2 == 0, ErrorKind::Domain,
          "band sampling needs an even number of intervals");
  BandSamples band;
  band.q.resize(samples + 1);
  band.energy.resize(samples + 1);
  double worst = 0.0;
  for (int m = 0; m <= samples; ++m) {
    // exact symmetric abscissae: q_m = -q_{samples-m}
    const double q = static_cast<double>(2 * m - samples) / samples;
    band.q(m) = q;
    band.energy(m) = lowest_state(depth, q, plane_waves).energy;
    const double wider = lowest_state(depth, q, plane_waves + 4).energy;
    worst = std::max(worst, std::abs(wider - band.energy(m)));
  }
  if (worst > tolerance) {
    std::ostringstream msg;
    msg << "plane-wave cutoff " << plane_waves << " too small at V0=" << depth
        << ": band moves by " << worst << " E_R when widened";
    fail(ErrorKind::Accuracy, msg.str());
  }
  return band;
}

WannierProfile wannier_function(double depth, const LatticeOptions &options) {
  check_plane_waves(options.plane_waves);
  const int nq = options.quasi_momenta;
  require(nq >= 4 && nq % 2 == 0, ErrorKind::Domain,
          "Wannier construction needs an even quasi-momentum count");
  const int pts = options.points_per_site;
  require(pts >= 16, ErrorKind::Domain, "need >= 16 points per site");

  const int half = options.plane_waves / 2;
  // Momenta p = q + 2j with q on the midpoint grid; all distinct.
  std::vector<double> momenta;
  std::vector<double> weights;
  momenta.reserve(static_cast<std::size_t>(nq * options.plane_waves));
  for (int m = 0; m < nq; ++m) {
    const double q = -1.0 + (2.0 * m + 1.0) / nq;
    const auto st = lowest_state(depth, q, options.plane_waves);
    for (int j = 0; j < options.plane_waves; ++j) {
      momenta.push_back(q + 2.0 * (j - half));
      weights.push_back(st.coefficients(j));
    }
  }

  // Even function on the periodic box of nq sites; sample x >= 0 only.
  const int k_max = nq * pts / 2;
  const double h = pi / pts;
  const double scale = 1.0 / (nq * std::sqrt(pi));
  WannierProfile prof;
  prof.dx = h;
  prof.x = Eigen::VectorXd::LinSpaced(k_max + 1, 0.0, k_max * h);
  prof.w = Eigen::VectorXd::Zero(k_max + 1);
  for (std::size_t n = 0; n < momenta.size(); ++n) {
    const std::complex<double> step = std::polar(1.0, momenta[n] * h);
    std::complex<double> z{1.0, 0.0};
    for (int k = 0; k <= k_max; ++k) {
      if (k % 256 == 0) z = std::polar(1.0, momenta[n] * k * h);
      prof.w(k) += weights[n] * z.real();
      z *= step;
    }
  }
  prof.w *= scale;

  // trapezoid over the full periodic box: x = 0 once, interior twice, edge once
  const Eigen::ArrayXd w2 = prof.w.array().square();
  prof.raw_norm =
      h * (w2(0) + 2.0 * w2.segment(1, k_max - 1).sum() + w2(k_max));
  if (std::abs(prof.raw_norm - 1.0) > options.normalization_tolerance) {
    std::ostringstream msg;
    msg << "Wannier normalization " << prof.raw_norm << " at V0=" << depth
        << " deviates from 1 by more than "
        << options.normalization_tolerance;
    fail(ErrorKind::Accuracy, msg.str());
  }
  prof.w /= std::sqrt(prof.raw_norm);
  return prof;
}

double wannier_moment_1d(const WannierProfile &profile, int m) {
  const auto n = profile.w.size() - 1;
  const Eigen::ArrayXd f = profile.w.array().pow(2 * m);
  return profile.dx * (f(0) + 2.0 * f.segment(1, n - 1).sum() + f(n));
}

double nearest_neighbor_hopping(double depth, const LatticeOptions &options) {
  const int nq = options.quasi_momenta;
  double s = 0.0;
  for (int m = 0; m < nq; ++m) {
    const double q = -1.0 + (2.0 * m + 1.0) / nq;
    // neighbouring sites sit a distance pi apart in units of 1/k
    s += lowest_state(depth, q, options.plane_waves).energy * std::cos(pi * q);
  }
  return -s / nq;
}

HubbardParams hubbard_params(const PhysicalSetup &setup, double depth,
                             const LatticeOptions &options) {
  if (!(depth >= options.min_depth)) {
    std::ostringstream msg;
    msg << "lattice depth " << depth << " E_R is below the minimum "
        << options.min_depth << " E_R";
    fail(ErrorKind::Domain, msg.str());
  }
  check_plane_waves(options.plane_waves);
  HubbardParams p;
  p.depth = depth;
  p.J = 0.25 * (lowest_state(depth, 1.0, options.plane_waves).energy -
                lowest_state(depth, 0.0, options.plane_waves).energy);

  const auto prof = wannier_function(depth, options);
  p.wannier_m2 = std::pow(wannier_moment_1d(prof, 2), 3);
  p.wannier_m3 = std::pow(wannier_moment_1d(prof, 3), 3);
  p.U_aa = setup.interaction_scale(setup.a_aa) * p.wannier_m2;
  p.U_bb = setup.interaction_scale(setup.a_bb) * p.wannier_m2;
  p.U_ab = setup.interaction_scale(setup.a_ab) * p.wannier_m2;
  const double k = setup.wavenumber();
  p.I2 = p.wannier_m2 * k * k * k;
  p.I3 = p.wannier_m3 * std::pow(k, 6);
  return p;
}

void RampSchedule::validate(double min_depth) const {
  require(v_init >= min_depth, ErrorKind::Domain,
          "ramp starts below the minimum lattice depth");
  require(v_c > v_init, ErrorKind::Domain, "ramp needs V_c > V_init");
  require(duration > 0.0, ErrorKind::Domain, "ramp duration must be positive");
  require(end_time == 0.0 || end_time >= duration, ErrorKind::Domain,
          "ramp end time must not precede its duration");
}

double ramp_at(const RampSchedule &schedule, double t) {
  const double last = schedule.last_time();
  if (!(t >= 0.0 && t <= last)) {
    std::ostringstream msg;
    msg << "time " << t << " s outside the ramp [0, " << last << "] s";
    fail(ErrorKind::Domain, msg.str());
  }
  if (t == schedule.duration) return schedule.v_c;
  return schedule.v_init + (schedule.v_c - schedule.v_init) * (t / schedule.duration);
}

double ramp_time(const RampSchedule &schedule, double v) {
  return (v - schedule.v_init) / (schedule.v_c - schedule.v_init) *
         schedule.duration;
}

struct DepthTable::Splines {
  boost::math::interpolators::cardinal_cubic_b_spline<double> log_j;
  boost::math::interpolators::cardinal_cubic_b_spline<double> m2;
  boost::math::interpolators::cardinal_cubic_b_spline<double> m3;
};

DepthTable::DepthTable(const PhysicalSetup &setup, double lo, double hi,
                       int points, const LatticeOptions &options, int jobs)
    : setup_(setup), lo_(lo), hi_(hi) {
  require(points >= 4 && hi > lo, ErrorKind::Domain,
          "depth table needs >= 4 points on a non-empty range");
  step_ = (hi - lo) / (points - 1);
  nodes_.resize(static_cast<std::size_t>(points));
  parallel_for(nodes_.size(), jobs, [&](std::size_t i) {
    const double v = (i + 1 == nodes_.size()) ? hi : lo + step_ * static_cast<double>(i);
    nodes_[i] = hubbard_params(setup, v, options);
  });
  std::vector<double> lj, m2, m3;
  for (const auto &n : nodes_) {
    lj.push_back(std::log(n.J));
    m2.push_back(n.wannier_m2);
    m3.push_back(n.wannier_m3);
  }
  splines_ = std::make_shared<const Splines>(Splines{
      {lj.begin(), lj.end(), lo, step_},
      {m2.begin(), m2.end(), lo, step_},
      {m3.begin(), m3.end(), lo, step_}});
}

HubbardParams DepthTable::at(double depth) const {
  if (!(depth >= lo_ - 1e-12 && depth <= hi_ + 1e-12)) {
    std::ostringstream msg;
    msg << "depth " << depth << " outside tabulated range [" << lo_ << ", "
        << hi_ << "]";
    fail(ErrorKind::Domain, msg.str());
  }
  const double v = std::clamp(depth, lo_, hi_);
  HubbardParams p;
  p.depth = v;
  p.J = std::exp(splines_->log_j(v));
  p.wannier_m2 = splines_->m2(v);
  p.wannier_m3 = splines_->m3(v);
  p.U_aa = setup_.interaction_scale(setup_.a_aa) * p.wannier_m2;
  p.U_bb = setup_.interaction_scale(setup_.a_bb) * p.wannier_m2;
  p.U_ab = setup_.interaction_scale(setup_.a_ab) * p.wannier_m2;
  const double k = setup_.wavenumber();
  p.I2 = p.wannier_m2 * k * k * k;
  p.I3 = p.wannier_m3 * std::pow(k, 6);
  return p;
}

}  // namespace spinsq
