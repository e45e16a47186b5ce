#pragma once

// Collective-spin moments of a two-mode state sum_Na d_Na |Na, N - Na>.
// S_z = (Na - Nb)/2, S_+ |Na, Nb> = sqrt((Na + 1) Nb) |Na + 1, Nb - 1>.
// Templated on the real scalar so tests can cross-check in long double.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "spinsq/error.hpp"

namespace spinsq {

template <typename Scalar>
struct SpinMoments {
  Scalar N = 0;
  Scalar sx = 0, sy = 0, sz = 0;
  Scalar sz2 = 0;
  std::complex<Scalar> splus2{};    // <S_+^2>
  std::complex<Scalar> splus_sz{};  // <S_+ S_z>
  Scalar s2 = 0;                    // <S^2> = (N/2)(N/2 + 1)
};

/// Moments of amplitudes d[k] for Na = first + k.
template <typename Scalar>
SpinMoments<Scalar> spin_moments(int N, int first,
                                 const std::vector<std::complex<Scalar>> &d) {
  using C = std::complex<Scalar>;
  const Scalar half = Scalar(N) / 2;
  C sp{}, sp2{}, spz{};
  Scalar sz = 0, sz2 = 0;
  const auto n = static_cast<int>(d.size());
  for (int k = 0; k < n; ++k) {
    const Scalar na = first + k;
    const Scalar m = na - half;
    const Scalar p = std::norm(d[static_cast<std::size_t>(k)]);
    sz += p * m;
    sz2 += p * m * m;
    if (k + 1 < n) {
      const Scalar amp = std::sqrt((na + 1) * (N - na));
      const C t = std::conj(d[static_cast<std::size_t>(k + 1)]) *
                  d[static_cast<std::size_t>(k)] * amp;
      sp += t;
      spz += t * m;
      if (k + 2 < n) {
        const Scalar amp2 = amp * std::sqrt((na + 2) * (N - na - 1));
        sp2 += std::conj(d[static_cast<std::size_t>(k + 2)]) *
               d[static_cast<std::size_t>(k)] * amp2;
      }
    }
  }
  SpinMoments<Scalar> out;
  out.N = N;
  out.sx = sp.real();
  out.sy = sp.imag();
  out.sz = sz;
  out.sz2 = sz2;
  out.splus2 = sp2;
  out.splus_sz = spz;
  out.s2 = half * (half + 1);
  return out;
}

template <typename Scalar>
struct Squeezing {
  Scalar xi2 = 0;
  Scalar mean_spin = 0;     // |<S>|
  Scalar min_variance = 0;  // minimal variance orthogonal to <S>
};

/// Wineland parameter N * min Var(S_perp) / |<S>|^2, with the minimum taken
/// over directions orthogonal to the mean spin.
template <typename Scalar>
Squeezing<Scalar> xi_squared(const SpinMoments<Scalar> &m) {
  using Mat = Eigen::Matrix<Scalar, 3, 3>;
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  const Vec mean(m.sx, m.sy, m.sz);
  const Scalar len = mean.norm();
  if (!(len > Scalar(1e-9) * m.N)) {
    fail(ErrorKind::Domain,
         "mean spin vanishes (over-wound phases); use a shorter evolution time");
  }
  // symmetrized second moments <{S_i, S_j}>/2
  const Scalar transverse = m.s2 - m.sz2;
  Mat sym;
  sym(0, 0) = (transverse + m.splus2.real()) / 2;
  sym(1, 1) = (transverse - m.splus2.real()) / 2;
  sym(2, 2) = m.sz2;
  sym(0, 1) = sym(1, 0) = m.splus2.imag() / 2;
  sym(0, 2) = sym(2, 0) = (2 * m.splus_sz.real() + m.sx) / 2;
  sym(1, 2) = sym(2, 1) = (2 * m.splus_sz.imag() + m.sy) / 2;
  const Mat cov = sym - mean * mean.transpose();

  // orthonormal pair spanning the plane orthogonal to the mean spin
  const Vec u = mean / len;
  Vec seed = std::abs(u(2)) < Scalar(0.9) ? Vec(0, 0, 1) : Vec(1, 0, 0);
  const Vec e1 = (seed - u * u.dot(seed)).normalized();
  const Vec e2 = u.cross(e1);
  const Scalar a = e1.dot(cov * e1), b = e2.dot(cov * e2), c = e1.dot(cov * e2);
  const Scalar vmin = (a + b) / 2 - std::sqrt((a - b) * (a - b) / 4 + c * c);

  Squeezing<Scalar> out;
  out.mean_spin = len;
  out.min_variance = vmin;
  out.xi2 = m.N * vmin / (len * len);
  return out;
}

/// 2^{-N/2} sqrt(C(N, Na)), evaluated in log space.
template <typename Scalar>
Scalar binomial_amplitude(int N, int na) {
  using std::lgamma;
  const Scalar lg = lgamma(Scalar(N + 1)) - lgamma(Scalar(na + 1)) -
                    lgamma(Scalar(N - na + 1)) - Scalar(N) * std::log(Scalar(2));
  return std::exp(lg / 2);
}

/// Amplitudes of the coherent spin state along +x with extra phases
/// phase(Na) applied as exp(-i phase).
template <typename Scalar, typename PhaseFn>
std::vector<std::complex<Scalar>> phased_binomial(int N, int first, int last,
                                                  PhaseFn &&phase) {
  std::vector<std::complex<Scalar>> d;
  d.reserve(static_cast<std::size_t>(last - first + 1));
  for (int na = first; na <= last; ++na)
    d.push_back(std::polar(binomial_amplitude<Scalar>(N, na), -Scalar(phase(na))));
  return d;
}

}  // namespace spinsq
