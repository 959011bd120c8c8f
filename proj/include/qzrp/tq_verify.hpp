#pragma once

// First-order check of the polynomial T-Q relation
//
//   T(x) Q(x) = e^{gamma N} Q(q x) + q^p (1-x)^N Q(x/q)
//
// expanded to O(gamma): Q_0 = x^p, T_0 = q^p + (1-x)^N, and the first-order
// pieces B_1, Q_1, T_1 are built from the coefficients of F^N. This is an
// independent route to the mean current: lambda_1 = [x^{p-1}] Q_1 must equal J.

#include <vector>

#include "qzrp/stationary.hpp"

namespace qzrp {

/// Dense coefficient vector, index = power of x.
template <class S>
using Poly = std::vector<S>;

template <class S>
struct TqFirstOrder {
  Poly<S> Q0;
  Poly<S> T0;
  Poly<S> B1;
  Poly<S> Q1;
  Poly<S> T1;
  S lambda1;
};

template <class S>
struct TqCheck {
  bool ok = false;
  Poly<S> residual;    // T0 Q1 + T1 Q0 - Q1(qx) - N Q0(qx) - q^p (1-x)^N Q1(x/q)
  S max_abs_residual;
  S Q1_at_1;           // must equal p
  S lambda1;           // must equal J
};

namespace detail {

template <class S>
Poly<S> poly_mul(const Poly<S>& a, const Poly<S>& b) {
  Poly<S> c(a.size() + b.size() - 1, S(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

template <class S>
void poly_axpy(Poly<S>& y, const S& alpha, const Poly<S>& x) {
  if (y.size() < x.size()) y.resize(x.size(), S(0));
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// P(c x)
template <class S>
Poly<S> poly_scale_arg(const Poly<S>& a, const S& c) {
  Poly<S> out(a.size());
  S ck(1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = a[k] * ck;
    ck *= c;
  }
  return out;
}

/// (1 - x)^N
template <class S>
Poly<S> one_minus_x_pow(int N) {
  Poly<S> c(N + 1);
  S binom(1);
  for (int k = 0; k <= N; ++k) {
    c[k] = (k % 2 == 0) ? binom : S(-binom);
    binom = binom * S(N - k) / S(k + 1);
  }
  return c;
}

template <class S>
void require_off_unity(const ModelParams<S>& params) {
  if (params.q.is_unity()) throw DomainError("T-Q first-order construction needs q != 1");
}

}  // namespace detail

/// b_i = -N (1-q)^{p-i} [z^i]F^N / Z(N,p), i = 0..p-1: the first p
/// coefficients of -N(1-q)^p F(x/(1-q))^N / Z(N,p).
template <class S>
Poly<S> b1_polynomial(const ModelParams<S>& params) {
  detail::require_off_unity(params);
  const int p = params.p;
  const S& q = params.q.q;
  const auto stat = stationary_data(params);
  const auto scaled = series_scale_arg(stat.Fn, S(S(1) / (S(1) - q)));
  const S factor = -S(params.N) * pow_int(S(S(1) - q), p) / stat.Z(p);
  Poly<S> b(p);
  for (int i = 0; i < p; ++i) b[i] = factor * scaled[i];
  return b;
}

/// q_i = b_i / (q^{p-i} - 1).
template <class S>
Poly<S> q1_polynomial(const Poly<S>& b1, const ModelParams<S>& params) {
  detail::require_off_unity(params);
  const int p = params.p;
  if (static_cast<int>(b1.size()) != p) throw DomainError("B_1 must have p coefficients");
  Poly<S> q1(p);
  for (int i = 0; i < p; ++i) {
    const S denom = pow_int(params.q.q, p - i) - S(1);
    if (denom == 0) throw DomainError("q^(p-i) = 1: Q_1 is undefined at this q");
    q1[i] = b1[i] / denom;
  }
  return q1;
}

/// T_1(x) = N q^p + x^{-p} [ (1-x)^N B_1(x) - B_1(q x) ].
/// The bracket's coefficients of x^0..x^{p-1} must vanish.
template <class S>
Poly<S> t1_polynomial(const Poly<S>& b1, const ModelParams<S>& params) {
  detail::require_off_unity(params);
  const int p = params.p;
  const int N = params.N;
  Poly<S> bracket = detail::poly_mul(detail::one_minus_x_pow<S>(N), b1);
  detail::poly_axpy(bracket, S(-1), detail::poly_scale_arg(b1, params.q.q));

  S scale(0);
  for (const auto& c : bracket) scale += abs_value(c);
  for (int i = 0; i < p; ++i) {
    if (!negligible(bracket[i], scale)) {
      throw PrecisionError("T_1 construction: bracket coefficient of x^" + std::to_string(i) +
                           " does not vanish (" + ScalarTraits<S>::to_string(bracket[i]) + ")");
    }
  }
  Poly<S> t1(bracket.begin() + p, bracket.end());
  if (t1.empty()) t1.push_back(S(0));
  t1[0] += S(N) * pow_int(params.q.q, p);
  return t1;
}

template <class S>
TqFirstOrder<S> tq_first_order(const ModelParams<S>& params) {
  const int p = params.p;
  Poly<S> Q0(p + 1, S(0));
  Q0[p] = S(1);
  Poly<S> T0 = detail::one_minus_x_pow<S>(params.N);
  T0[0] += pow_int(params.q.q, p);
  Poly<S> B1 = b1_polynomial(params);
  Poly<S> Q1 = q1_polynomial(B1, params);
  Poly<S> T1 = t1_polynomial(B1, params);
  S lambda1 = Q1[p - 1];
  return TqFirstOrder<S>{std::move(Q0), std::move(T0), std::move(B1), std::move(Q1), std::move(T1),
                         std::move(lambda1)};
}

/// Evaluates the first-order T-Q identity as a polynomial of degree <= N + p.
template <class S>
TqCheck<S> verify_tq_first_order(const TqFirstOrder<S>& tq, const ModelParams<S>& params) {
  using namespace detail;
  const S& q = params.q.q;

  Poly<S> lhs = poly_mul(tq.T0, tq.Q1);
  poly_axpy(lhs, S(1), poly_mul(tq.T1, tq.Q0));

  Poly<S> rhs = poly_scale_arg(tq.Q1, q);
  poly_axpy(rhs, S(params.N), poly_scale_arg(tq.Q0, q));
  // q^p Q_1(x/q) has coefficients q_i q^{p-i}; no division by q.
  Poly<S> shifted(tq.Q1.size());
  for (std::size_t i = 0; i < tq.Q1.size(); ++i) shifted[i] = tq.Q1[i] * pow_int(q, params.p - static_cast<int>(i));
  poly_axpy(rhs, S(1), poly_mul(one_minus_x_pow<S>(params.N), shifted));

  Poly<S> residual = lhs;
  poly_axpy(residual, S(-1), rhs);

  S max_abs(0), scale(0);
  for (const auto& c : residual) max_abs = std::max(max_abs, abs_value(c));
  for (const auto& c : lhs) scale += abs_value(c);
  for (const auto& c : rhs) scale += abs_value(c);

  S Q1_at_1(0);
  for (const auto& c : tq.Q1) Q1_at_1 += c;

  const bool ok = negligible(max_abs, scale);
  return TqCheck<S>{ok, std::move(residual), std::move(max_abs), std::move(Q1_at_1), tq.lambda1};
}

}  // namespace qzrp
