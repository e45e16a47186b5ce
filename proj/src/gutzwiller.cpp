#include "spinsq/gutzwiller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spinsq/error.hpp"
#include "spinsq/parallel.hpp"

namespace spinsq {

int fock_dimension(int n_max) { return (n_max + 1) * (n_max + 2) / 2; }

int fock_index(int n_max, int na, int nb) {
  // rows na = 0..n_max hold n_max + 1 - na states each
  return na * (n_max + 1) - na * (na - 1) / 2 + nb;
}

namespace {

// Working basis: the triangle, minus any species whose filling is zero.
struct LocalSpace {
  int n_max = 0;
  int dim = 0;
  bool has_a = true, has_b = true;
  std::vector<int> full;               // position in the full triangle
  std::vector<int> below_a, below_b;   // index of |na-1,nb>, |na,nb-1> or -1
  Eigen::VectorXd occ_a, occ_b, onsite;
  std::vector<char> on_shell;          // na + nb == n_max
};

LocalSpace make_space(int n_max, bool has_a, bool has_b,
                      const HubbardParams &p) {
  LocalSpace s;
  s.n_max = n_max;
  s.has_a = has_a;
  s.has_b = has_b;
  std::vector<int> pos(static_cast<std::size_t>(fock_dimension(n_max)), -1);
  std::vector<int> na_list, nb_list;
  for (int na = 0; na <= (has_a ? n_max : 0); ++na)
    for (int nb = 0; nb <= (has_b ? n_max - na : 0); ++nb) {
      pos[static_cast<std::size_t>(fock_index(n_max, na, nb))] =
          static_cast<int>(na_list.size());
      na_list.push_back(na);
      nb_list.push_back(nb);
    }
  s.dim = static_cast<int>(na_list.size());
  s.occ_a.resize(s.dim);
  s.occ_b.resize(s.dim);
  s.onsite.resize(s.dim);
  for (int i = 0; i < s.dim; ++i) {
    const int na = na_list[static_cast<std::size_t>(i)];
    const int nb = nb_list[static_cast<std::size_t>(i)];
    s.full.push_back(fock_index(n_max, na, nb));
    s.below_a.push_back(na > 0 ? pos[static_cast<std::size_t>(fock_index(n_max, na - 1, nb))] : -1);
    s.below_b.push_back(nb > 0 ? pos[static_cast<std::size_t>(fock_index(n_max, na, nb - 1))] : -1);
    s.on_shell.push_back(na + nb == n_max);
    s.occ_a(i) = na;
    s.occ_b(i) = nb;
    s.onsite(i) = 0.5 * p.U_aa * na * (na - 1) + 0.5 * p.U_bb * nb * (nb - 1) +
                  p.U_ab * na * nb;
  }
  return s;
}

class Solver {
 public:
  Solver(const LocalSpace &space, double zJ, double fill_a, double fill_b,
         const GutzwillerOptions &opt)
      : s_(space), zJ_(zJ), opt_(opt) {
    if (s_.has_a) {
      occ_.push_back(&s_.occ_a);
      target_.push_back(fill_a);
    }
    if (s_.has_b) {
      occ_.push_back(&s_.occ_b);
      target_.push_back(fill_b);
    }
  }

  double order_a(const Eigen::VectorXd &c) const { return lowered(c, s_.below_a, s_.occ_a); }
  double order_b(const Eigen::VectorXd &c) const { return lowered(c, s_.below_b, s_.occ_b); }

  double energy(const Eigen::VectorXd &c) const {
    const double pa = order_a(c), pb = order_b(c);
    return -zJ_ * (pa * pa + pb * pb) + c.cwiseAbs2().dot(s_.onsite);
  }

  // Self-consistent single-site Hamiltonian at amplitudes c.
  Eigen::MatrixXd mean_field(const Eigen::VectorXd &c) const {
    Eigen::MatrixXd h = s_.onsite.asDiagonal();
    const double pa = order_a(c), pb = order_b(c);
    for (int i = 0; i < s_.dim; ++i) {
      if (const int j = s_.below_a[static_cast<std::size_t>(i)]; j >= 0)
        h(i, j) = h(j, i) = -zJ_ * pa * std::sqrt(s_.occ_a(i));
      if (const int j = s_.below_b[static_cast<std::size_t>(i)]; j >= 0)
        h(i, j) = h(j, i) = -zJ_ * pb * std::sqrt(s_.occ_b(i));
    }
    return h;
  }

  // Constraint columns [c, N_a c, N_b c].
  Eigen::MatrixXd constraint_basis(const Eigen::VectorXd &c) const {
    Eigen::MatrixXd b(s_.dim, 1 + static_cast<Eigen::Index>(occ_.size()));
    b.col(0) = c;
    for (std::size_t k = 0; k < occ_.size(); ++k)
      b.col(static_cast<Eigen::Index>(k) + 1) = occ_[k]->cwiseProduct(c);
    return b;
  }

  // Rescale |c_i| by exp(theta . n_i) and renormalize so the mean fillings hit
  // their targets. Newton on theta; the Jacobian is twice the occupation
  // covariance, pseudo-inverted because it is singular in the Mott limit.
  Eigen::VectorXd project(const Eigen::VectorXd &c) const {
    const auto k = static_cast<Eigen::Index>(occ_.size());
    Eigen::ArrayXd logw(s_.dim);
    for (int i = 0; i < s_.dim; ++i)
      logw(i) = c(i) != 0.0 ? 2.0 * std::log(std::abs(c(i)))
                            : -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd occ(s_.dim, k);
    Eigen::VectorXd target(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      occ.col(j) = *occ_[static_cast<std::size_t>(j)];
      target(j) = target_[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
    auto weights = [&](const Eigen::VectorXd &th) {
      Eigen::ArrayXd l = logw + 2.0 * (occ * th).array();
      Eigen::ArrayXd w = (l - l.maxCoeff()).exp();
      return Eigen::VectorXd((w / w.sum()).matrix());
    };
    Eigen::VectorXd w = weights(theta);
    Eigen::VectorXd r = occ.transpose() * w - target;
    for (int it = 0; it < 200 && k > 0; ++it) {
      if (r.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + target.cwiseAbs().maxCoeff()))
        break;
      const Eigen::VectorXd mean = occ.transpose() * w;
      const Eigen::MatrixXd centred = occ.rowwise() - mean.transpose();
      const Eigen::MatrixXd jac =
          2.0 * centred.transpose() * w.asDiagonal() * centred;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
      const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      bool moved = false;
      // the loose cut drops directions whose eigenvectors are rounding noise
      for (double rel : {1e-30, 1e-12}) {
        Eigen::VectorXd inv = es.eigenvalues();
        for (Eigen::Index j = 0; j < k; ++j)
          inv(j) = std::abs(inv(j)) > rel * top ? 1.0 / inv(j) : 0.0;
        const Eigen::VectorXd step =
            es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * r;
        double scale = 1.0;
        for (int half = 0; half < 40 && !moved; ++half, scale *= 0.5) {
          const Eigen::VectorXd th = theta - scale * step;
          const Eigen::VectorXd wt = weights(th);
          const Eigen::VectorXd rt = occ.transpose() * wt - target;
          if (rt.norm() < r.norm()) {
            theta = th;
            w = wt;
            r = rt;
            moved = true;
          }
        }
        if (moved) break;
      }
      if (!moved) break;
    }
    if (r.size() > 0 && r.cwiseAbs().maxCoeff() > 0.1 * opt_.constraint_tol) {
      std::ostringstream msg;
      msg << "filling projection failed (residual " << r.cwiseAbs().maxCoeff()
          << "); amplitudes lack support for the target fillings";
      fail(ErrorKind::Convergence, msg.str());
    }
    Eigen::VectorXd out(s_.dim);
    for (int i = 0; i < s_.dim; ++i)
      out(i) = std::copysign(std::sqrt(w(i)), c(i) == 0.0 ? 1.0 : c(i));
    return out;
  }

  struct Stationarity {
    Eigen::MatrixXd h;
    Eigen::VectorXd nu;        // (lambda, mu_a?, mu_b?)
    Eigen::VectorXd residual;  // h c - B nu
  };

  Stationarity stationarity(const Eigen::VectorXd &c) const {
    Stationarity st;
    st.h = mean_field(c);
    const Eigen::MatrixXd b = constraint_basis(c);
    const Eigen::VectorXd hc = st.h * c;
    st.nu = b.completeOrthogonalDecomposition().solve(hc);
    st.residual = hc - b * st.nu;
    return st;
  }

  // Newton direction on the KKT system of the constrained problem.
  Eigen::VectorXd newton_direction(const Eigen::VectorXd &c,
                                   const Stationarity &st) const {
    const Eigen::MatrixXd b = constraint_basis(c);
    const auto k = b.cols();
    Eigen::MatrixXd hl = st.h;
    hl.diagonal().array() -= st.nu(0);
    for (Eigen::Index j = 1; j < k; ++j)
      hl.diagonal() -= st.nu(j) * *occ_[static_cast<std::size_t>(j - 1)];
    const Eigen::VectorXd sa = symmetrized(c, s_.below_a, s_.occ_a);
    const Eigen::VectorXd sb = symmetrized(c, s_.below_b, s_.occ_b);
    hl.noalias() -= 4.0 * zJ_ * (sa * sa.transpose() + sb * sb.transpose());

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s_.dim + k, s_.dim + k);
    kkt.topLeftCorner(s_.dim, s_.dim) = hl;
    kkt.topRightCorner(s_.dim, k) = b;
    kkt.bottomLeftCorner(k, s_.dim) = b.transpose();
    Eigen::VectorXd rhs(s_.dim + k);
    rhs.head(s_.dim) = -st.residual;
    rhs(s_.dim) = -0.5 * (c.squaredNorm() - 1.0);
    for (Eigen::Index j = 1; j < k; ++j)
      rhs(s_.dim + j) =
          -0.5 * (c.dot(occ_[static_cast<std::size_t>(j - 1)]->cwiseProduct(c)) -
                  target_[static_cast<std::size_t>(j - 1)]);
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(s_.dim);
  }

  const LocalSpace &space() const { return s_; }
  double energy_scale() const {
    return zJ_ + std::max(s_.onsite.maxCoeff() / (s_.n_max * s_.n_max), 1e-3);
  }

 private:
  // (A + A^T) c / 2 for the lowering operator of one species
  Eigen::VectorXd symmetrized(const Eigen::VectorXd &c, const std::vector<int> &below,
                              const Eigen::VectorXd &occ) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s_.dim);
    for (int i = 0; i < s_.dim; ++i)
      if (const int j = below[static_cast<std::size_t>(i)]; j >= 0) {
        const double amp = std::sqrt(occ(i));
        out(j) += 0.5 * amp * c(i);
        out(i) += 0.5 * amp * c(j);
      }
    return out;
  }

  double lowered(const Eigen::VectorXd &c, const std::vector<int> &below,
                 const Eigen::VectorXd &occ) const {
    double s = 0.0;
    for (int i = 0; i < s_.dim; ++i)
      if (const int j = below[static_cast<std::size_t>(i)]; j >= 0)
        s += std::sqrt(occ(i)) * c(j) * c(i);
    return s;
  }

  const LocalSpace &s_;
  double zJ_;
  GutzwillerOptions opt_;
  std::vector<const Eigen::VectorXd *> occ_;
  std::vector<double> target_;
};

struct RunResult {
  Eigen::VectorXd c;
  double energy = 0.0;
  double gradient = std::numeric_limits<double>::infinity();
  Eigen::VectorXd nu;
  int iterations = 0;
  bool converged = false;
};

// Monotone descent: Newton-KKT steps when they lower the energy, otherwise
// an imaginary-time step exp(-dtau h) with backtracking on dtau.
RunResult descend(const Solver &solver, Eigen::VectorXd c, int max_iter,
                  double tol, std::vector<double> *history) {
  RunResult run;
  c = solver.project(c);
  double e = solver.energy(c);
  if (history) history->push_back(e);
  const double dtau0 = 1.0 / solver.energy_scale();
  double dtau = dtau0;
  const auto accept = [&](double trial) { return trial <= e + 1e-13 * std::abs(e); };

  for (int it = 0; it < max_iter; ++it) {
    const auto st = solver.stationarity(c);
    run.gradient = st.residual.norm();
    run.nu = st.nu;
    run.iterations = it;
    if (run.gradient <= tol) {
      run.converged = true;
      break;
    }

    bool stepped = false;
    const Eigen::VectorXd dir = solver.newton_direction(c, st);
    if (dir.allFinite()) {
      double scale = 1.0;
      for (int half = 0; half < 4 && !stepped; ++half, scale *= 0.5) {
        Eigen::VectorXd trial;
        try {
          trial = solver.project(c + scale * dir);
        } catch (const Error &) {
          continue;
        }
        const double et = solver.energy(trial);
        if (accept(et)) {
          c = std::move(trial);
          e = std::min(e, et);
          stepped = true;
        }
      }
    }

    if (!stepped) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.h);
      const Eigen::VectorXd coeff = es.eigenvectors().transpose() * c;
      const Eigen::ArrayXd shifted = es.eigenvalues().array() - es.eigenvalues()(0);
      while (dtau > 1e-12 * dtau0) {
        Eigen::VectorXd trial;
        bool ok = true;
        try {
          trial = solver.project(es.eigenvectors() *
                                 ((-dtau * shifted).exp() * coeff.array()).matrix());
        } catch (const Error &) {
          ok = false;
        }
        const double et = ok ? solver.energy(trial) : 0.0;
        if (ok && accept(et)) {
          c = std::move(trial);
          e = std::min(e, et);
          dtau = std::min(2.0 * dtau, 1e8 * dtau0);
          stepped = true;
          break;
        }
        dtau *= 0.25;
      }
    }

    if (history && stepped) history->push_back(e);
    if (!stepped) {
      // no representable decrease left: accept if the gradient is at the
      // round-off floor of the energy evaluation
      run.converged = run.gradient <= 1e3 * tol;
      break;
    }
    run.iterations = it + 1;
  }
  if (!run.converged) {
    const auto st = solver.stationarity(c);
    run.gradient = st.residual.norm();
    run.nu = st.nu;
    run.converged = run.gradient <= tol;
  }
  run.c = std::move(c);
  run.energy = solver.energy(run.c);
  return run;
}

Eigen::VectorXd product_guess(const LocalSpace &s, double fill_a, double fill_b) {
  Eigen::VectorXd c(s.dim);
  for (int i = 0; i < s.dim; ++i) {
    // Poisson amplitudes in log form; fillings may be zero only when masked
    const auto logp = [](double mean, double n) {
      return mean > 0.0 ? n * std::log(mean) - mean - std::lgamma(n + 1.0) : 0.0;
    };
    c(i) = std::exp(0.5 * (logp(fill_a, s.occ_a(i)) + logp(fill_b, s.occ_b(i))));
  }
  return c.normalized();
}

}  // namespace

GutzwillerState minimize(const HubbardParams &params, int coordination,
                         double fill_a, double fill_b,
                         const GutzwillerOptions &options,
                         const GutzwillerState *warm) {
  require(fill_a >= 0.0 && fill_b >= 0.0, ErrorKind::Domain,
          "fillings must be non-negative");
  require(fill_a + fill_b > 0.0, ErrorKind::Domain, "total filling must be positive");
  require(options.n_max >= 2 && fill_a + fill_b <= 0.5 * options.n_max,
          ErrorKind::Domain, "total filling exceeds n_max/2 truncation headroom");
  require(options.tol > 0.0, ErrorKind::Domain, "tolerance must be positive");
  require(params.J >= 0.0, ErrorKind::Domain, "hopping must be non-negative");

  const LocalSpace space =
      make_space(options.n_max, fill_a > 0.0, fill_b > 0.0, params);
  const Solver solver(space, coordination * params.J, fill_a, fill_b, options);
  std::vector<double> history;
  auto *hist = options.record_history ? &history : nullptr;

  Eigen::VectorXd start;
  if (warm && warm->n_max == options.n_max && warm->amplitudes.size() ==
                                                  fock_dimension(options.n_max)) {
    start.resize(space.dim);
    for (int i = 0; i < space.dim; ++i)
      start(i) = warm->amplitudes(space.full[static_cast<std::size_t>(i)]);
    // revive basis states the previous solution had dropped to exact zero
    const Eigen::VectorXd floor = 1e-9 * product_guess(space, fill_a, fill_b);
    start = start.cwiseAbs().cwiseMax(floor);
  } else {
    // short runs from the product guess and jittered copies; the lowest one
    // is continued (its history is kept so the record covers the full path)
    const Eigen::VectorXd guess = product_guess(space, fill_a, fill_b);
    RunResult best = descend(solver, guess, 30, options.tol, hist);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    for (int k = 0; k < options.random_starts; ++k) {
      Eigen::VectorXd trial = guess;
      for (int i = 0; i < space.dim; ++i) trial(i) *= jitter(rng);
      std::vector<double> trial_history;
      RunResult r = descend(solver, trial, 30, options.tol,
                            hist ? &trial_history : nullptr);
      if (r.energy < best.energy) {
        best = std::move(r);
        history = std::move(trial_history);
      }
    }
    start = best.c;
    // the continuation re-records its starting energy
    if (hist && !history.empty()) history.pop_back();
  }

  RunResult run = descend(solver, start, options.max_iter, options.tol, hist);
  if (!run.converged) {
    std::ostringstream msg;
    msg << "Gutzwiller minimization did not converge in " << options.max_iter
        << " iterations at V0=" << params.depth << " (fillings " << fill_a
        << ", " << fill_b << "); last gradient norm " << run.gradient;
    fail(ErrorKind::Convergence, msg.str());
  }

  // gauge: overall sign so that the amplitudes are non-negative
  if (run.c.sum() < 0.0) run.c = -run.c;

  GutzwillerState out;
  out.n_max = options.n_max;
  out.fill_a = fill_a;
  out.fill_b = fill_b;
  out.amplitudes = Eigen::VectorXd::Zero(fock_dimension(options.n_max));
  for (int i = 0; i < space.dim; ++i)
    out.amplitudes(space.full[static_cast<std::size_t>(i)]) = run.c(i);
  out.phi_a = solver.order_a(run.c);
  out.phi_b = solver.order_b(run.c);
  out.energy = run.energy;
  Eigen::Index slot = 1;
  out.mu_a = space.has_a ? run.nu(slot++) : 0.0;
  out.mu_b = space.has_b ? run.nu(slot) : 0.0;
  out.gradient_norm = run.gradient;
  out.iterations = run.iterations;
  out.energy_history = std::move(history);
  for (int i = 0; i < space.dim; ++i)
    if (space.on_shell[static_cast<std::size_t>(i)]) out.tail_weight += run.c(i) * run.c(i);

  const double norm_err = std::abs(run.c.squaredNorm() - 1.0);
  const double err_a = std::abs(run.c.cwiseAbs2().dot(space.occ_a) - fill_a);
  const double err_b = std::abs(run.c.cwiseAbs2().dot(space.occ_b) - fill_b);
  if (std::max({norm_err, err_a, err_b}) > options.constraint_tol) {
    std::ostringstream msg;
    msg << "constraint violation at convergence: |norm-1|=" << norm_err
        << ", filling errors " << err_a << ", " << err_b;
    fail(ErrorKind::Convergence, msg.str());
  }
  if (out.tail_weight > options.tail_tol) {
    std::ostringstream msg;
    msg << "truncation tail weight " << out.tail_weight << " exceeds "
        << options.tail_tol << " at n_max=" << options.n_max
        << "; increase n_max";
    fail(ErrorKind::Accuracy, msg.str());
  }
  return out;
}

OnSiteObservables observables(const GutzwillerState &state) {
  OnSiteObservables o;
  o.phi_a = state.phi_a;
  o.phi_b = state.phi_b;
  double m1a = 0, m2a = 0, m3a = 0, m1b = 0, m2b = 0, m3b = 0, mab = 0, m2t = 0;
  const int n = state.n_max;
  for (int na = 0; na <= n; ++na)
    for (int nb = 0; na + nb <= n; ++nb) {
      const double c = state.amplitudes(fock_index(n, na, nb));
      const double p = c * c;
      m1a += p * na;
      m1b += p * nb;
      m2a += p * na * (na - 1);
      m2b += p * nb * (nb - 1);
      m3a += p * na * (na - 1) * (na - 2);
      m3b += p * nb * (nb - 1) * (nb - 2);
      mab += p * na * nb;
      m2t += p * (na + nb) * (na + nb);
    }
  o.mean_a = m1a;
  o.mean_b = m1b;
  o.var_a = std::max(0.0, m2a + m1a - m1a * m1a);
  o.var_b = std::max(0.0, m2b + m1b - m1b * m1b);
  o.var_total = std::max(0.0, m2t - (m1a + m1b) * (m1a + m1b));
  if (m1a > 0.0) {
    o.g2_aa = m2a / (m1a * m1a);
    o.g3_a = m3a / (m1a * m1a * m1a);
  }
  if (m1b > 0.0) {
    o.g2_bb = m2b / (m1b * m1b);
    o.g3_b = m3b / (m1b * m1b * m1b);
  }
  if (m1a > 0.0 && m1b > 0.0) o.g2_ab = mab / (m1a * m1b);
  return o;
}

double find_vc(const PhysicalSetup &setup, double fill_a, double fill_b,
               double tol, const LatticeOptions &lattice,
               const GutzwillerOptions &options, double lo, double hi,
               double threshold) {
  require(std::abs(fill_a + fill_b - 1.0) < 1e-12, ErrorKind::Domain,
          "critical depth search needs unit total filling");
  require(tol > 0.0, ErrorKind::Domain, "tolerance must be positive");
  lo = std::max(lo, lattice.min_depth);
  require(hi > lo, ErrorKind::Domain, "empty depth range for the V_c search");
  const auto superfluid = [&](double v) {
    const auto st = minimize(hubbard_params(setup, v, lattice),
                             setup.coordination, fill_a, fill_b, options);
    return std::max(st.phi_a * st.phi_a, st.phi_b * st.phi_b) > threshold;
  };
  const double scan_lo = lo, scan_hi = hi;
  if (!superfluid(lo) || superfluid(hi)) {
    std::ostringstream msg;
    msg << "no superfluid-to-Mott change on the scanned depth range ["
        << scan_lo << ", " << scan_hi << "] E_R";
    fail(ErrorKind::Regime, msg.str());
  }
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    (superfluid(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<std::size_t> EnergySurface::row(double atoms) const {
  for (std::size_t i = 0; i < atom_numbers.size(); ++i)
    if (std::abs(atom_numbers[i] - atoms) < 1e-9) return i;
  return std::nullopt;
}

std::vector<double> surface_atom_numbers(int N, int lo, int hi) {
  require(N >= 2 && 0 <= lo && lo <= hi && hi <= N, ErrorKind::Domain,
          "atom-number window must lie inside [0, N]");
  std::vector<double> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  const double mid = 0.5 * N;
  for (double extra : {mid - 1.0, mid, mid + 1.0})
    if (extra >= 0.0 && extra <= N) out.push_back(extra);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-9; }),
            out.end());
  return out;
}

EnergySurface energy_surface(const PhysicalSetup &setup, int N,
                             std::vector<double> atom_numbers,
                             std::span<const HubbardParams> params_by_depth,
                             const GutzwillerOptions &options, int jobs) {
  require(N >= 1, ErrorKind::Domain, "surface needs N >= 1");
  require(!atom_numbers.empty() && !params_by_depth.empty(), ErrorKind::Domain,
          "surface needs a non-empty window and depth grid");
  for (std::size_t i = 0; i < atom_numbers.size(); ++i) {
    require(atom_numbers[i] >= 0.0 && atom_numbers[i] <= N, ErrorKind::Domain,
            "surface window must lie inside [0, N]");
    require(i == 0 || atom_numbers[i] > atom_numbers[i - 1], ErrorKind::Domain,
            "surface window must be strictly increasing");
  }
  EnergySurface surf;
  surf.N = N;
  surf.atom_numbers = std::move(atom_numbers);
  const auto nd = static_cast<Eigen::Index>(params_by_depth.size());
  surf.depths.resize(nd);
  for (Eigen::Index k = 0; k < nd; ++k) {
    surf.depths(k) = params_by_depth[static_cast<std::size_t>(k)].depth;
    require(k == 0 || surf.depths(k) > surf.depths(k - 1), ErrorKind::Domain,
            "depth grid must be strictly increasing");
  }
  surf.cells.resize(surf.atom_numbers.size() * static_cast<std::size_t>(nd));

  parallel_for(surf.atom_numbers.size(), jobs, [&](std::size_t row) {
    const double atoms = surf.atom_numbers[row];
    const double fa = atoms / N;
    const double fb = 1.0 - fa;
    GutzwillerState prev;
    for (Eigen::Index k = 0; k < nd; ++k) {
      const auto &p = params_by_depth[static_cast<std::size_t>(k)];
      GutzwillerState st;
      try {
        st = minimize(p, setup.coordination, fa, fb, options, k > 0 ? &prev : nullptr);
      } catch (const Error &e) {
        std::ostringstream msg;
        msg << "surface cell (Na=" << atoms << ", V0=" << p.depth
            << "): " << e.what();
        throw Error(e.kind(), msg.str());
      }
      const auto obs = observables(st);
      SurfaceCell &cell = surf.cells[row * static_cast<std::size_t>(nd) +
                                     static_cast<std::size_t>(k)];
      cell.energy_per_site = st.energy;
      cell.total_energy = N * st.energy;
      cell.mu_a = st.mu_a;
      cell.mu_b = st.mu_b;
      cell.g2_aa = obs.g2_aa.value_or(0.0);
      cell.g2_bb = obs.g2_bb.value_or(0.0);
      cell.g2_ab = obs.g2_ab.value_or(0.0);
      cell.g3_a = obs.g3_a.value_or(0.0);
      cell.g3_b = obs.g3_b.value_or(0.0);
      cell.phi2 = st.phi_a * st.phi_a + st.phi_b * st.phi_b;
      prev = std::move(st);
    }
  });
  return surf;
}

EnergySurface energy_surface(const PhysicalSetup &setup, int N,
                             std::vector<double> atom_numbers,
                             const Eigen::VectorXd &depths,
                             const LatticeOptions &lattice,
                             const GutzwillerOptions &options, int jobs) {
  std::vector<HubbardParams> params(static_cast<std::size_t>(depths.size()));
  parallel_for(params.size(), jobs, [&](std::size_t k) {
    params[k] = hubbard_params(setup, depths(static_cast<Eigen::Index>(k)), lattice);
  });
  return energy_surface(setup, N, std::move(atom_numbers), params, options, jobs);
}

SpinCurvature spin_curvature(const HubbardParams &params, int coordination,
                             int N, const GutzwillerOptions &options,
                             const GutzwillerState *warm) {
  require(N >= 2, ErrorKind::Domain, "spin curvature needs N >= 2");
  SpinCurvature out;
  out.center = minimize(params, coordination, 0.5, 0.5, options, warm);
  // three-point Gauss-Legendre on [0, 1]
  const double r = 0.5 * std::sqrt(0.6);
  const double nodes[3] = {0.5 - r, 0.5, 0.5 + r};
  const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = nodes[i] / N;
    const auto up = minimize(params, coordination, 0.5 + d, 0.5 - d, options, &out.center);
    const auto down = minimize(params, coordination, 0.5 - d, 0.5 + d, options, &out.center);
    total += weights[i] * ((up.mu_a - up.mu_b) - (down.mu_a - down.mu_b));
  }
  out.second_difference = total;
  return out;
}

}  // namespace spinsq
