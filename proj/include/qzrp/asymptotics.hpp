#pragma once

// Saddle-point asymptotics of the stationary state and the universal
// constants built from it: fugacity z*, log-derivatives h_k, KPZ amplitude
// A and nonlinearity lambda, the predicted Delta / N^{3/2}, and the EW-KPZ
// crossover function.
//
// ln F is evaluated from its product form, which converges for every
// admissible z (including z beyond the radius of the log-derivative series
// when q > 1):
//   |q| < 1:  ln F(z) = -sum_{i>=0} ln(1 - w_i),  w_i = (1-q) z q^i
//   q > 1:    ln F(z) =  sum_{i>=0} ln(1 + w_i),  w_i = (1-1/q) z q^{-i}
//   q = 1:    ln F(z) = z

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/constants/constants.hpp>

#include "qzrp/numerics.hpp"

namespace qzrp {

namespace detail {

// (w d/dw)^k of -ln(1 - w).
template <class S>
S minus_log1m_derivative(const S& w, int k) {
  using std::log;
  const S u = S(1) - w;
  switch (k) {
    case 0: return S(-log(u));
    case 1: return w / u;
    case 2: return w / (u * u);
    case 3: return w * (S(1) + w) / (u * u * u);
    case 4: return w * (S(1) + S(4) * w + w * w) / (u * u * u * u);
  }
  throw DomainError("log-derivative order must be 0..4");
}

}  // namespace detail

/// (z d/dz)^k ln F(z), k = 0..4, with truncation error below `tol`.
template <class S>
S log_f_log_derivative(const S& z, const QValue<S>& q, int k, const S& tol) {
  if (k < 0 || k > 4) throw DomainError("log-derivative order must be 0..4");
  if (!(z > 0)) throw DomainError("z must be positive");
  if (q.is_unity()) return z;  // ln F = z is a fixed point of z d/dz

  const bool above = q.regime == Regime::above_one;
  const S c = above ? S(S(1) - S(1) / q.q) : S(S(1) - q.q);
  const S ratio = above ? S(S(1) / q.q) : q.q;
  const S abs_ratio = abs_value(ratio);
  S w = c * z;
  if (!above && !(w < 1)) throw DomainError("z at or beyond the singularity 1/(1-q) of F");

  S sum(0);
  // For |v| <= 1/2 every derivative satisfies |D_k(v)| <= 64 |v|, so once |w|
  // is that small the remaining terms are bounded by 64 |w| |r| / (1 - |r|).
  // Individual terms can vanish (e.g. at w = 1 for k = 3), so the bound is
  // taken on w rather than on the term.
  const S half = S(1) / S(2);
  for (int i = 0; i < 1000000; ++i) {
    // -ln(1 - (-w)) with sign flip realizes ln(1 + w) for q > 1.
    const S term = above ? S(-detail::minus_log1m_derivative(S(-w), k)) : detail::minus_log1m_derivative(w, k);
    sum += term;
    if (w == 0) break;
    const S abs_w = abs_value(w);
    if (abs_w <= half && S(64) * abs_w * abs_ratio <= tol * (S(1) - abs_ratio)) break;
    w *= ratio;
  }
  return sum;
}

/// Smallest positive z with z (ln F)'(z) = rho. Bisection to a bracket,
/// then Newton polish (d/dz of z (ln F)' is h_2 / z).
template <class S>
S saddle_point(const S& rho, const QValue<S>& q, const S& tol) {
  if (!(rho > 0)) throw DomainError("density must be positive");
  if (q.is_unity()) return rho;
  const S inner_tol = tol * S(1e-3);
  auto h1 = [&](const S& z) { return log_f_log_derivative(z, q, 1, inner_tol) - rho; };

  S lo(0), hi;
  if (q.regime == Regime::below_one) {
    const S zmax = S(1) / (S(1) - q.q);
    // Approach the singularity geometrically until h1 > 0.
    S gap = zmax / S(2);
    hi = zmax - gap;
    int guard = 0;
    while (h1(hi) <= 0) {
      lo = hi;
      gap /= S(2);
      hi = zmax - gap;
      if (++guard > 4000) throw SolverError("saddle_point: could not bracket the root");
    }
  } else {
    hi = rho;
    int guard = 0;
    while (h1(hi) <= 0) {
      lo = hi;
      hi *= S(2);
      if (++guard > 4000) throw SolverError("saddle_point: could not bracket the root");
    }
  }

  // A few bisections, then bracketed Newton.
  for (int it = 0; it < 12; ++it) {
    const S mid = (lo + hi) / S(2);
    if (h1(mid) > 0) hi = mid; else lo = mid;
  }
  S z = (lo + hi) / S(2);
  for (int it = 0; it < 200; ++it) {
    const S f = h1(z);
    if (abs_value(f) <= tol) return z;
    const S slope = log_f_log_derivative(z, q, 2, inner_tol) / z;
    S next = z - f / slope;
    if (!(next > lo && next < hi)) next = (lo + hi) / S(2);
    if (h1(next) > 0) hi = next; else lo = next;
    z = next;
  }
  if (abs_value(h1(z)) <= tol) return z;
  throw SolverError("saddle_point: Newton iteration did not converge");
}

template <class S>
struct SaddleData {
  S zstar;
  std::array<S, 5> h;  // (z d/dz)^k [ln F - rho ln z] at z*
  S free_energy;       // -h_0
  S j_inf;             // z*
  S lambda_nl;         // (z*/h2)(1/h2 - h3/h2^2)
  S A;                 // h2
  S current_fss;       // lim N (j_N - j_inf) = (z*/2)(h3/h2^2 - 1/h2)
  S rho;
};

template <class S>
SaddleData<S> saddle_data(const S& rho, const QValue<S>& q, const S& tol) {
  using std::log;
  const S z = saddle_point(rho, q, tol);
  const S inner_tol = tol * S(1e-3);
  std::array<S, 5> h;
  for (int k = 0; k <= 4; ++k) h[k] = log_f_log_derivative(z, q, k, inner_tol);
  h[0] -= rho * log(z);
  h[1] -= rho;
  const S& h2 = h[2];
  const S& h3 = h[3];
  S lambda = z / h2 * (S(1) / h2 - h3 / (h2 * h2));
  S fss = z / S(2) * (h3 / (h2 * h2) - S(1) / h2);
  return SaddleData<S>{z, h, S(-h[0]), z, std::move(lambda), h2, std::move(fss), rho};
}

/// e^{N h0}/sqrt(2 pi N h2) [1 + (1/2N)(h4/(4 h2^2) - 5 h3^2/(12 h2^3))].
template <class S>
S partition_asymp(int N, const SaddleData<S>& sd) {
  using std::exp;
  using std::sqrt;
  const S n(N);
  const auto& h = sd.h;
  const S pi = boost::math::constants::pi<S>();
  const S corr = S(1) + (h[4] / (S(4) * h[2] * h[2]) - S(5) * h[3] * h[3] / (S(12) * h[2] * h[2] * h[2])) /
                            (S(2) * n);
  return exp(n * h[0]) / sqrt(S(2) * pi * n * h[2]) * corr;
}

/// Two-term expansion of a normalized contour integral
/// oint g F^N / z^{p+1} / Z(N,p): g0 + (1/2N)(h3 g1/h2^2 - g2/h2),
/// with g_k = (z d/dz)^k g at z*.
template <class S>
S normalized_integral_expansion(const S& g0, const S& g1, const S& g2, const SaddleData<S>& sd, int N) {
  const S& h2 = sd.h[2];
  const S& h3 = sd.h[3];
  return g0 + (h3 * g1 / (h2 * h2) - g2 / h2) / (S(2) * S(N));
}

/// Predicted lim Delta / N^{3/2} = (sqrt(pi)/4) z* |h3 - h2| / h2^{3/2}
/// = kappa_KPZ A^{3/2} |lambda|.
template <class S>
S kpz_coefficient(const SaddleData<S>& sd) {
  using std::sqrt;
  const S pi = boost::math::constants::pi<S>();
  const S& h2 = sd.h[2];
  return sqrt(pi) / S(4) * sd.zstar * abs_value(S(sd.h[3] - h2)) / (h2 * sqrt(h2));
}

/// phi_1, phi_2 at z* with the limiting J/p = z*/rho.
template <class S>
std::array<S, 2> result2_phi(const SaddleData<S>& sd) {
  const S& rho = sd.rho;
  return {S((sd.h[2] - rho) / rho), S((sd.h[3] - S(2) * sd.h[2] + rho) / rho)};
}

/// sqrt(pi)/(8 sqrt(h2)) (phi1 h3/|h2| - phi2). Comparison channel only;
/// kpz_coefficient is the prediction used by the acceptance gate.
template <class S>
S kpz_coefficient_result2(const SaddleData<S>& sd, const S& phi1, const S& phi2) {
  using std::sqrt;
  const S pi = boost::math::constants::pi<S>();
  const S& h2 = sd.h[2];
  return sqrt(pi) / (S(8) * sqrt(h2)) * (phi1 * sd.h[3] / abs_value(h2) - phi2);
}

// ---------------------------------------------------------------------------
// EW-KPZ crossover (machine precision)

/// F(g, inf) = sqrt(g)/(2 sqrt 2) int_0^inf y^2 e^{-y^2} / tanh(sqrt(g/32) y) dy.
double crossover_F(double g, double quad_tol = 1e-12);

struct CrossoverData {
  double alpha;
  double rho;
  double g;       // 8 rho alpha^2
  double D_ew;    // rho
  double nu_ew;   // 1/2
  double Fg;      // F(g, inf)
  double prediction;  // rho F(g, inf), the limit of Delta / N
};

CrossoverData crossover_prediction(double rho, double alpha, double quad_tol = 1e-12);

}  // namespace qzrp
