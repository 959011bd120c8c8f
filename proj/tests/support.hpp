#pragma once

// Brute-force helpers shared by the unit tests. Nothing here goes through
// the power-series machinery of the library.

#include <functional>
#include <stdexcept>
#include <vector>

#include "qzrp/numerics.hpp"

namespace support {

using qzrp::Rational;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

/// Visits every occupation vector of p particles on N sites.
inline void for_each_config(int N, int p, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> n(static_cast<std::size_t>(N), 0);
  std::function<void(int, int)> rec = [&](int site, int left) {
    if (site == N - 1) {
      n[site] = left;
      visit(n);
      return;
    }
    for (int m = 0; m <= left; ++m) {
      n[site] = m;
      rec(site + 1, left - m);
    }
  };
  rec(0, p);
}

/// [n]_q as 1 + q + ... + q^{n-1}; valid at q = 1 as well.
template <class S>
S q_integer(int n, const S& q) {
  S sum(0), term(1);
  for (int i = 0; i < n; ++i) {
    sum += term;
    term *= q;
  }
  return sum;
}

template <class S>
S one_site_weight(int m, const S& q) {
  S w(1);
  for (int j = 1; j <= m; ++j) w /= q_integer(j, q);
  return w;
}

template <class S>
S config_weight(const std::vector<int>& n, const S& q) {
  S w(1);
  for (int m : n) w *= one_site_weight(m, q);
  return w;
}

/// Z(N,p) by direct enumeration.
template <class S>
S brute_Z(int N, int p, const S& q) {
  S Z(0);
  for_each_config(N, p, [&](const std::vector<int>& n) { Z += config_weight(n, q); });
  return Z;
}

/// Stationary mean of the total jump rate, which is J.
template <class S>
S brute_J(int N, int p, const S& q) {
  S num(0);
  for_each_config(N, p, [&](const std::vector<int>& n) {
    S rate(0);
    for (int m : n) rate += q_integer(m, q);
    num += config_weight(n, q) * rate;
  });
  return num / brute_Z(N, p, q);
}

}  // namespace support

namespace support {

template <class S>
struct BruteCumulants {
  S J;
  S Delta;
};

/// J and Delta from second-order perturbation of the tilted generator,
/// assembled from scratch with dense Gaussian elimination. Exact scalars only.
template <class S>
BruteCumulants<S> brute_cumulants(int N, int p, const S& q) {
  std::vector<std::vector<int>> configs;
  for_each_config(N, p, [&](const std::vector<int>& n) { configs.push_back(n); });
  const std::size_t M = configs.size();
  auto index = [&](const std::vector<int>& n) {
    for (std::size_t s = 0; s < M; ++s)
      if (configs[s] == n) return s;
    throw std::logic_error("configuration not found");
  };

  // K[to][from] carries jump rates, R[s] the exit rates.
  std::vector<std::vector<S>> K(M, std::vector<S>(M, S(0)));
  std::vector<S> R(M, S(0));
  for (std::size_t s = 0; s < M; ++s) {
    for (int i = 0; i < N; ++i) {
      const int m = configs[s][i];
      if (m == 0) continue;
      const S rate = q_integer(m, q);
      auto next = configs[s];
      next[i] -= 1;
      next[(i + 1) % N] += 1;
      K[index(next)][s] += rate;
      R[s] += rate;
    }
  }

  std::vector<S> pi(M);
  S total(0);
  for (std::size_t s = 0; s < M; ++s) total += (pi[s] = config_weight(configs[s], q));
  for (auto& x : pi) x /= total;

  auto apply_K = [&](const std::vector<S>& x) {
    std::vector<S> y(M, S(0));
    for (std::size_t a = 0; a < M; ++a)
      for (std::size_t b = 0; b < M; ++b) y[a] += K[a][b] * x[b];
    return y;
  };
  auto sum = [](const std::vector<S>& x) {
    S t(0);
    for (const auto& v : x) t += v;
    return t;
  };

  const auto Kpi = apply_K(pi);
  const S lambda1 = sum(Kpi);

  // Bordered system [[K - R, 1], [1^T, 0]] (psi, mu) = ((lambda1 - K) pi, 0).
  const std::size_t n = M + 1;
  std::vector<std::vector<S>> A(n, std::vector<S>(n + 1, S(0)));
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) A[a][b] = K[a][b];
    A[a][a] -= R[a];
    A[a][M] = S(1);
    A[M][a] = S(1);
    A[a][n] = lambda1 * pi[a] - Kpi[a];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (A[piv][col] == 0) ++piv;
    std::swap(A[piv], A[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || A[row][col] == 0) continue;
      const S factor = A[row][col] / A[col][col];
      for (std::size_t k = col; k <= n; ++k) A[row][k] -= factor * A[col][k];
    }
  }
  std::vector<S> psi(M);
  for (std::size_t a = 0; a < M; ++a) psi[a] = A[a][n] / A[a][a];

  const S lambda2 = lambda1 / 2 + sum(apply_K(psi));
  return {lambda1, S(2) * lambda2};
}

}  // namespace support
