#pragma once

// Exact group diffusion coefficient Delta of the q-boson ZRP.
//
// With C_a = [z^a] F^N, phi_b the phi-series coefficients and
// A_k = sum_{a+b=p-1-k} C_a phi_b, the double contour integrals reduce to
//
//   S1 = sum_{k<p} Z(N,p+k) A_k
//   S2 = sum_{k<p} Z(N,p+k) [ sum_b C_{p-1-k-b} phi_b G(k+1+b) + [k>=1] A_k G(k) ]
//   Delta = p J + 2 N^2 / Z(N,p)^2 (S1 + S2)
//
// where G(a) resums the i-sum of q^{ia} kernels. For |q| < 1, G(a) =
// sum_{i>=1} q^{ia} = q^a/(1-q^a). For q > 1 the same rational function of q
// is used, written through r = 1/q as G(a) = -sum_{i>=0} r^{ia}. The k = 0
// i-independent branch carries A_0, which vanishes identically because
// J = N Z(N,p-1)/Z(N,p).

#include <optional>
#include <string_view>

#include "qzrp/stationary.hpp"

namespace qzrp {

enum class DeltaMethod { resummed, truncated, unity };

inline std::string_view method_name(DeltaMethod m) {
  switch (m) {
    case DeltaMethod::resummed: return "resummed";
    case DeltaMethod::truncated: return "truncated";
    case DeltaMethod::unity: return "unity";
  }
  return "";
}

template <class S>
struct DeltaResult {
  S Delta;
  S J;
  S Zp;       // Z(N, p)
  S pJ_term;  // p J
  S S1;       // phi(y)/(t-y) double integral
  S S2;       // i-sum of the q^{+-i} kernels
  S A0;       // [y^{p-1}](F^N phi); zero up to roundoff
  DeltaMethod method = DeltaMethod::resummed;
  int i_max = 0;      // truncated only: number of i-terms kept
  S tail;             // truncated only: exact omitted contribution to Delta
  S tail_bound;       // truncated only: bound on |tail|
};

namespace detail {

// Shared coefficient tables for both evaluation methods.
template <class S>
struct DeltaTables {
  StationaryData<S> stat;
  PhiSeries<S> phi;
  std::vector<S> A;          // A_k, k = 0..p-1
  S A0_scale;                // sum of |C_a phi_b| entering A_0
  S prefactor;               // 2 N^2 / Z(N,p)^2
};

template <class S>
DeltaTables<S> delta_tables(const ModelParams<S>& params) {
  const int p = params.p;
  auto stat = stationary_data(params);
  auto phi = phi_coefficients(params, stat.J, static_cast<std::size_t>(p - 1));
  std::vector<S> A(p, S(0));
  S A0_scale(0);
  for (int k = 0; k < p; ++k) {
    for (int a = 0; a <= p - 1 - k; ++a) {
      const S term = stat.Fn[a] * phi[p - 1 - k - a];
      A[k] += term;
      if (k == 0) A0_scale += abs_value(term);
    }
  }
  if (!negligible(A[0], A0_scale)) {
    throw PrecisionError("A_0 = [y^(p-1)](F^N phi) is not zero within tolerance (value " +
                         ScalarTraits<S>::to_string(A[0]) + "); refusing to drop the divergent branch");
  }
  const S Zp = stat.Z(p);
  const S prefactor = S(2) * S(params.N) * S(params.N) / (Zp * Zp);
  return DeltaTables<S>{std::move(stat), std::move(phi), std::move(A), std::move(A0_scale), prefactor};
}

template <class S>
DeltaResult<S> unity_result(const ModelParams<S>& params) {
  const S p(params.p);
  const auto stat = stationary_data(params);
  return DeltaResult<S>{p, p, stat.Z(params.p), p * p, S(0), S(0), S(0),
                        DeltaMethod::unity, 0, S(0), S(0)};
}

template <class S>
S s1_sum(const ModelParams<S>& params, const DeltaTables<S>& t) {
  S s1(0);
  for (int k = 0; k < params.p; ++k) s1 += t.stat.Z(params.p + k) * t.A[k];
  return s1;
}

}  // namespace detail

/// Delta from the closed-form geometric resummation; exact on rationals.
template <class S>
DeltaResult<S> delta_exact_resummed(const ModelParams<S>& params) {
  if (params.q.is_unity()) return detail::unity_result(params);
  const int p = params.p;
  const auto t = detail::delta_tables(params);
  const S& r = params.q.r;
  const bool above = params.q.regime == Regime::above_one;

  // G(a) for a = 1..2p-1.
  std::vector<S> G(2 * p, S(0));
  for (int a = 1; a < 2 * p; ++a) {
    const S g = geometric_factor(r, a);
    G[a] = above ? S(-(S(1) + g)) : g;
  }

  S s2(0);
  for (int k = 0; k < p; ++k) {
    S inner(0);
    for (int b = 0; b <= p - 1 - k; ++b) inner += t.stat.Fn[p - 1 - k - b] * t.phi[b] * G[k + 1 + b];
    if (k >= 1) inner += t.A[k] * G[k];
    s2 += t.stat.Z(p + k) * inner;
  }
  const S s1 = detail::s1_sum(params, t);
  const S pJ = S(p) * t.stat.J;
  S Delta = pJ + t.prefactor * (s1 + s2);
  return DeltaResult<S>{std::move(Delta), t.stat.J, t.stat.Z(p), pJ, s1, s2, t.A[0],
                        DeltaMethod::resummed, 0, S(0), S(0)};
}

/// Delta with the i-sum evaluated term by term, keeping `i_max` terms
/// (i = 1..i_max for |q| < 1, i = 0..i_max-1 for q > 1). `tail` is the exact
/// omitted remainder and `tail_bound` bounds its magnitude.
template <class S>
DeltaResult<S> delta_exact_truncated(const ModelParams<S>& params, int i_max) {
  if (i_max < 0) throw DomainError("i_max must be nonnegative");
  if (params.q.is_unity()) return detail::unity_result(params);
  const int p = params.p;
  const auto t = detail::delta_tables(params);
  const S& r = params.q.r;
  const bool above = params.q.regime == Regime::above_one;
  const S sign = above ? S(-1) : S(1);
  const int i_first = above ? 0 : 1;

  // B_k = sum_b C_{p-1-k-b} phi_b r^b, evaluated at r^i for each i-term.
  S s2(0);
  for (int n = 0; n < i_max; ++n) {
    const int i = i_first + n;
    const S ri = pow_int(r, i);
    S term(0);
    S rik(1);  // r^{ik}
    for (int k = 0; k < p; ++k) {
      S part(0);
      S rib = ri;  // r^{i(b+1)}
      for (int b = 0; b <= p - 1 - k; ++b) {
        part += t.stat.Fn[p - 1 - k - b] * t.phi[b] * rib;
        rib *= ri;
      }
      term += rik * t.stat.Z(p + k) * (part + t.A[k]);
      rik *= ri;
    }
    s2 += sign * term;
  }

  // Remainder: sum over omitted i of r^{ia} is r^{(i_first+i_max) a}/(1-r^a).
  const int i_next = i_first + i_max;
  const S abs_r = abs_value(r);
  S tail(0), bound(0);
  for (int k = 0; k < p; ++k) {
    S exact_part(0), bound_part(0);
    for (int b = 0; b <= p - 1 - k; ++b) {
      const int a = k + 1 + b;
      const S coef = t.stat.Fn[p - 1 - k - b] * t.phi[b];
      exact_part += coef * pow_int(r, static_cast<long long>(i_next) * a) / (S(1) - pow_int(r, a));
      bound_part += abs_value(coef) * pow_int(abs_r, static_cast<long long>(i_next) * a) /
                    (S(1) - pow_int(abs_r, a));
    }
    if (k >= 1) {
      exact_part += t.A[k] * pow_int(r, static_cast<long long>(i_next) * k) / (S(1) - pow_int(r, k));
      bound_part += abs_value(t.A[k]) * pow_int(abs_r, static_cast<long long>(i_next) * k) /
                    (S(1) - pow_int(abs_r, k));
    }
    tail += t.stat.Z(p + k) * exact_part;
    bound += abs_value(t.stat.Z(p + k)) * bound_part;
  }
  tail *= sign * t.prefactor;
  bound *= t.prefactor;

  const S s1 = detail::s1_sum(params, t);
  const S pJ = S(p) * t.stat.J;
  S Delta = pJ + t.prefactor * (s1 + s2);
  return DeltaResult<S>{std::move(Delta), t.stat.J, t.stat.Z(p), pJ, s1, s2, t.A[0],
                        DeltaMethod::truncated, i_max, std::move(tail), std::move(bound)};
}

/// N^2 Z(2N,2p)/Z(N,p)^2 (j_N - j_2N): finite-size-correction estimate of
/// Delta, accurate to O(N) in Delta (O(1/N) in Delta/N^2).
template <class S>
S delta_fss_estimate(const ModelParams<S>& params) {
  if (params.q.is_unity()) throw DomainError("fss estimate is defined for q != 1");
  const auto p = static_cast<std::size_t>(params.p);
  TruncSeries<S> F = weight_series(params.q, 2 * p);
  TruncSeries<S> Fn = series_pow(F, params.N);
  TruncSeries<S> F2n = series_mul(Fn, Fn);
  const S N(params.N);
  const S jN = Fn[p - 1] / Fn[p];
  const S j2N = F2n[2 * p - 1] / F2n[2 * p];
  return N * N * F2n[2 * p] / (Fn[p] * Fn[p]) * (jN - j2N);
}

}  // namespace qzrp
