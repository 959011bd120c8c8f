#pragma once

// Stationary state of the q-boson zero-range process on a ring: rates,
// one-site weights, partition functions, mean current, occupation statistics
// and the phi-series used by the diffusion-coefficient formula.

#include <optional>
#include <vector>

#include "qzrp/numerics.hpp"

namespace qzrp {

/// Ring of N sites carrying p particles with deformation parameter q.
template <class S>
struct ModelParams {
  int N;
  int p;
  QValue<S> q;

  static ModelParams make(int N, int p, const S& q) {
    if (N < 1) throw DomainError("N must be >= 1");
    if (p < 1) throw DomainError("p must be >= 1");
    return ModelParams{N, p, QValue<S>::make(q)};
  }

  S rho() const { return S(p) / S(N); }
};

/// Jump rate u(n) = [n]_q = (1 - q^n)/(1 - q); u(n) = n at q = 1.
template <class S>
S rate_u(int n, const QValue<S>& q) {
  if (n < 0) throw DomainError("occupation must be nonnegative");
  if (q.is_unity()) return S(n);
  return (S(1) - pow_int(q.q, n)) / (S(1) - q.q);
}

/// One-site weight f(m) = prod_{j=1}^m 1/u(j), f(0) = 1.
template <class S>
S weight_f(int m, const QValue<S>& q) {
  if (m < 0) throw DomainError("occupation must be nonnegative");
  S f(1);
  for (int j = 1; j <= m; ++j) f /= rate_u(j, q);
  return f;
}

/// F(z) = sum_m f(m) z^m truncated at degree D.
template <class S>
TruncSeries<S> weight_series(const QValue<S>& q, std::size_t degree) {
  std::vector<S> f(degree + 1);
  f[0] = S(1);
  for (std::size_t m = 1; m <= degree; ++m) f[m] = f[m - 1] / rate_u(static_cast<int>(m), q);
  return TruncSeries<S>(std::move(f));
}

template <class S>
struct StationaryData {
  TruncSeries<S> F;   // weights f(0..D)
  TruncSeries<S> Fn;  // F^N to degree D >= 2p
  S J;                // mean integrated current
  S jN;               // bond current J/N

  /// Z(N, k) for k <= D.
  const S& Z(std::size_t k) const { return series_coeff(Fn, k); }
};

/// Builds F^N once to degree max(2p, min_degree) and reads off J.
template <class S>
StationaryData<S> stationary_data(const ModelParams<S>& params, std::size_t min_degree = 0) {
  const std::size_t degree = std::max<std::size_t>(2 * static_cast<std::size_t>(params.p), min_degree);
  TruncSeries<S> F = weight_series(params.q, degree);
  TruncSeries<S> Fn = series_pow(F, params.N);
  const S& Zp = Fn[params.p];
  if (!(Zp > 0)) throw PrecisionError("partition function Z(N,p) is not positive");
  S J = S(params.N) * Fn[params.p - 1] / Zp;
  S jN = J / S(params.N);
  return StationaryData<S>{std::move(F), std::move(Fn), std::move(J), std::move(jN)};
}

/// Z(N, k) for k = 0..pmax.
template <class S>
std::vector<S> partition_Z(const ModelParams<S>& params, int pmax) {
  if (pmax < 0) throw DomainError("pmax must be nonnegative");
  const auto data = stationary_data(params, static_cast<std::size_t>(pmax));
  auto c = data.Fn.coeffs();
  return std::vector<S>(c.begin(), c.begin() + pmax + 1);
}

template <class S>
S mean_current_J(const ModelParams<S>& params) {
  return stationary_data(params).J;
}

template <class S>
struct IntensiveQuantities {
  S j_N;                    // current through one bond
  S v_p;                    // single-particle velocity
  std::optional<S> Delta_j; // bond current diffusion coefficient
  std::optional<S> Delta_p; // single-particle diffusion coefficient
};

template <class S>
IntensiveQuantities<S> intensive_quantities(const ModelParams<S>& params, const S& J,
                                            const std::optional<S>& Delta = std::nullopt) {
  const S N(params.N);
  const S rho = params.rho();
  IntensiveQuantities<S> out{J / N, J / N / rho, std::nullopt, std::nullopt};
  if (Delta) {
    out.Delta_j = *Delta / (N * N);
    out.Delta_p = *out.Delta_j / (rho * rho);
  }
  return out;
}

/// P(n_1 = m) for m = 0..p, from f(m) Z(N-1, p-m) / Z(N, p).
template <class S>
std::vector<S> site_marginals(const ModelParams<S>& params) {
  if (params.N < 2) throw DomainError("site marginal needs N >= 2 (N = 1 is the delta at p)");
  const auto p = static_cast<std::size_t>(params.p);
  TruncSeries<S> F = weight_series(params.q, p);
  TruncSeries<S> Frest = series_pow(F, params.N - 1);
  const S Zp = series_mul(Frest, F)[p];
  std::vector<S> P(p + 1);
  for (std::size_t m = 0; m <= p; ++m) P[m] = F[m] * Frest[p - m] / Zp;
  return P;
}

template <class S>
S site_marginal(const ModelParams<S>& params, int m) {
  if (m < 0 || m > params.p) throw DomainError("occupation must lie in 0..p");
  return site_marginals(params)[static_cast<std::size_t>(m)];
}

/// k = 1: mean occupation; k = 2: occupation variance.
template <class S>
S occupation_moments(const ModelParams<S>& params, int k) {
  if (k < 1 || k > 2) throw DomainError("occupation_moments supports k = 1 or 2");
  if (params.N == 1) return k == 1 ? S(params.p) : S(0);
  const auto P = site_marginals(params);
  S m1(0), m2(0);
  for (std::size_t m = 0; m < P.size(); ++m) {
    m1 += S(static_cast<long>(m)) * P[m];
    m2 += S(static_cast<long>(m * m)) * P[m];
  }
  return k == 1 ? m1 : S(m2 - m1 * m1);
}

/// Coefficients of phi(z) = (J/p)(ln F)'(z) - 1.
template <class S>
struct PhiSeries {
  std::vector<S> coeffs;
  const S& operator[](std::size_t k) const { return coeffs[k]; }
};

/// phi_m = (J/p)(1-q)^{m+1}/(1-q^{m+1}) - [m = 0], m = 0..D.
template <class S>
PhiSeries<S> phi_coefficients(const ModelParams<S>& params, const S& J, std::size_t degree) {
  if (params.q.is_unity()) throw DomainError("phi-series is undefined at q = 1");
  const S& q = params.q.q;
  const S ratio = J / S(params.p);
  std::vector<S> phi(degree + 1);
  S one_minus_q_pow = S(1) - q;
  S q_pow = q;
  for (std::size_t m = 0; m <= degree; ++m) {
    phi[m] = ratio * one_minus_q_pow / (S(1) - q_pow);
    one_minus_q_pow *= S(1) - q;
    q_pow *= q;
  }
  phi[0] -= S(1);
  return PhiSeries<S>{std::move(phi)};
}

}  // namespace qzrp
