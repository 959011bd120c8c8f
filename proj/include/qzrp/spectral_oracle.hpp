#pragma once

// Ground-truth J and Delta for small rings by perturbation theory on the
// deformed generator L_gamma = L + (e^gamma - 1) K over the full
// configuration space, where K holds the jump rates (each jump advances the
// integrated current by one) and L = K - diag(R).
//
// With pi the stationary vector (L pi = 0, <1,pi> = 1):
//   lambda_1 = <1, K pi> = J
//   L psi = (lambda_1 - K) pi,  <1, psi> = 0
//   lambda_2 = J/2 + <1, K psi>,  Delta = 2 lambda_2

#include <cstddef>
#include <map>
#include <vector>

#include "qzrp/stationary.hpp"

namespace qzrp {

inline constexpr std::size_t kDefaultStateCap = 20000;

/// Number of occupation vectors of p particles on N sites, C(N+p-1, p);
/// saturates at SIZE_MAX.
std::size_t config_count(int N, int p);

/// All occupation vectors with sum p, in lexicographic order.
class ConfigSpace {
 public:
  ConfigSpace(int N, int p, std::size_t cap = kDefaultStateCap);

  int sites() const { return N_; }
  int particles() const { return p_; }
  std::size_t size() const { return configs_.size(); }
  const std::vector<int>& operator[](std::size_t i) const { return configs_[i]; }
  std::size_t index_of(const std::vector<int>& config) const;

 private:
  int N_;
  int p_;
  std::vector<std::vector<int>> configs_;
  std::map<std::vector<int>, std::size_t> index_;
};

template <class S>
struct Jump {
  std::size_t from;
  std::size_t to;
  S rate;
};

template <class S>
struct GeneratorPair {
  ConfigSpace space;
  std::vector<S> exit_rate;   // R(n) = sum_i u(n_i)
  std::vector<Jump<S>> jumps; // one entry per occupied site; self-loops when N = 1
};

template <class S>
GeneratorPair<S> build_generator(const ModelParams<S>& params, std::size_t cap = kDefaultStateCap) {
  ConfigSpace space(params.N, params.p, cap);
  std::vector<S> rates(params.p + 1);
  for (int n = 0; n <= params.p; ++n) rates[n] = rate_u(n, params.q);

  std::vector<S> exit(space.size(), S(0));
  std::vector<Jump<S>> jumps;
  std::vector<int> next;
  for (std::size_t s = 0; s < space.size(); ++s) {
    const auto& config = space[s];
    for (int i = 0; i < params.N; ++i) {
      if (config[i] == 0) continue;
      next = config;
      next[i] -= 1;
      next[(i + 1) % params.N] += 1;
      jumps.push_back(Jump<S>{s, space.index_of(next), rates[config[i]]});
      exit[s] += rates[config[i]];
    }
  }
  return GeneratorPair<S>{std::move(space), std::move(exit), std::move(jumps)};
}

namespace detail {

/// Dense Gaussian elimination on the bordered system
///   [ L   1 ] [x]   [rhs]
///   [ 1^T 0 ] [mu] = [border]
template <class S>
std::vector<S> solve_bordered_dense(const GeneratorPair<S>& gen, const std::vector<S>& rhs, const S& border) {
  const std::size_t M = gen.space.size();
  const std::size_t n = M + 1;
  std::vector<S> a(n * (n + 1), S(0));
  auto at = [&](std::size_t r, std::size_t c) -> S& { return a[r * (n + 1) + c]; };
  for (const auto& j : gen.jumps) at(j.to, j.from) += j.rate;
  for (std::size_t s = 0; s < M; ++s) {
    at(s, s) -= gen.exit_rate[s];
    at(s, M) = S(1);
    at(M, s) = S(1);
    at(s, n) = rhs[s];
  }
  at(M, n) = border;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    if constexpr (ScalarTraits<S>::exact) {
      for (std::size_t r = col; r < n; ++r)
        if (at(r, col) != 0) { piv = r; break; }
    } else {
      S best(0);
      for (std::size_t r = col; r < n; ++r) {
        const S v = abs_value(at(r, col));
        if (v > best) { best = v; piv = r; }
      }
    }
    if (piv == n) throw SolverError("bordered generator system is singular");
    if (piv != col)
      for (std::size_t c = col; c <= n; ++c) std::swap(at(piv, c), at(col, c));
    const S inv = S(1) / at(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (at(r, col) == 0) continue;
      const S factor = at(r, col) * inv;
      for (std::size_t c = col; c <= n; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  std::vector<S> x(n, S(0));
  for (std::size_t r = n; r-- > 0;) {
    S acc = at(r, n);
    for (std::size_t c = r + 1; c < n; ++c) acc -= at(r, c) * x[c];
    x[r] = acc / at(r, r);
  }
  x.resize(M);
  return x;
}

/// (L x) for the generator.
template <class S>
std::vector<S> apply_generator(const GeneratorPair<S>& gen, const std::vector<S>& x) {
  std::vector<S> y(x.size(), S(0));
  for (std::size_t s = 0; s < x.size(); ++s) y[s] -= gen.exit_rate[s] * x[s];
  for (const auto& j : gen.jumps) y[j.to] += j.rate * x[j.from];
  return y;
}

template <class S>
void check_residual(const GeneratorPair<S>& gen, const std::vector<S>& x, const std::vector<S>& rhs,
                    const char* what) {
  if constexpr (ScalarTraits<S>::exact) return;
  const auto y = apply_generator(gen, x);
  S worst(0), scale(1);
  for (std::size_t s = 0; s < y.size(); ++s) {
    worst = std::max(worst, abs_value(S(y[s] - rhs[s])));
    scale = std::max(scale, abs_value(rhs[s]));
  }
  for (const auto& r : gen.exit_rate) scale = std::max(scale, r);
  if (worst > S(1e-9) * scale) throw SolverError(std::string(what) + ": linear solve residual above tolerance");
}

}  // namespace detail

/// Eigen SparseLU route for machine-precision oracles.
std::vector<double> solve_bordered(const GeneratorPair<double>& gen, const std::vector<double>& rhs,
                                   double border);

template <class S>
std::vector<S> solve_bordered(const GeneratorPair<S>& gen, const std::vector<S>& rhs, const S& border) {
  return detail::solve_bordered_dense(gen, rhs, border);
}

/// Solves L pi = 0 with <1, pi> = 1.
template <class S>
std::vector<S> stationary_vector(const GeneratorPair<S>& gen) {
  const std::vector<S> zero(gen.space.size(), S(0));
  auto pi = solve_bordered(gen, zero, S(1));
  detail::check_residual(gen, pi, zero, "stationary_vector");
  return pi;
}

/// Normalized product of one-site weights over the configuration space.
template <class S>
std::vector<S> product_form_vector(const ModelParams<S>& params, const ConfigSpace& space) {
  std::vector<S> f(params.p + 1);
  for (int m = 0; m <= params.p; ++m) f[m] = weight_f(m, params.q);
  std::vector<S> pi(space.size());
  S total(0);
  for (std::size_t s = 0; s < space.size(); ++s) {
    S w(1);
    for (int n : space[s]) w *= f[n];
    pi[s] = w;
    total += w;
  }
  for (auto& v : pi) v /= total;
  return pi;
}

template <class S>
struct OracleResult {
  S lambda1;
  S lambda2;
  S J;      // lambda1
  S Delta;  // 2 lambda2
  std::size_t states = 0;
};

template <class S>
OracleResult<S> lambda_derivatives(const GeneratorPair<S>& gen, const std::vector<S>& pi) {
  const std::size_t M = gen.space.size();
  std::vector<S> Kpi(M, S(0));
  for (const auto& j : gen.jumps) Kpi[j.to] += j.rate * pi[j.from];
  S lambda1(0);
  for (const auto& v : Kpi) lambda1 += v;

  std::vector<S> rhs(M);
  for (std::size_t s = 0; s < M; ++s) rhs[s] = lambda1 * pi[s] - Kpi[s];
  auto psi = solve_bordered(gen, rhs, S(0));
  detail::check_residual(gen, psi, rhs, "lambda_derivatives");

  S Kpsi(0);
  for (const auto& j : gen.jumps) Kpsi += j.rate * psi[j.from];
  S lambda2 = lambda1 / S(2) + Kpsi;
  S Delta = S(2) * lambda2;
  return OracleResult<S>{lambda1, std::move(lambda2), lambda1, std::move(Delta), M};
}

template <class S>
OracleResult<S> spectral_oracle(const ModelParams<S>& params, std::size_t cap = kDefaultStateCap) {
  const auto gen = build_generator(params, cap);
  const auto pi = stationary_vector(gen);
  return lambda_derivatives(gen, pi);
}

// ---------------------------------------------------------------------------
// Finite-difference cross-check on the Perron eigenvalue

/// Generator rates in extended precision, detached from the scalar backend.
struct MachineGenerator {
  std::size_t states = 0;
  std::vector<long double> exit_rate;
  std::vector<Jump<long double>> jumps;
};

template <class S>
MachineGenerator to_machine(const GeneratorPair<S>& gen) {
  MachineGenerator m;
  m.states = gen.space.size();
  for (const auto& r : gen.exit_rate) m.exit_rate.push_back(ScalarTraits<S>::to_long_double(r));
  for (const auto& j : gen.jumps)
    m.jumps.push_back(Jump<long double>{j.from, j.to, ScalarTraits<S>::to_long_double(j.rate)});
  return m;
}

/// Perron eigenvalue of L + (e^gamma - 1) K by power iteration on the
/// nonnegative shift L_gamma + c I; stops when the Collatz-Wielandt bounds
/// are within `tol`.
long double lambda_gamma(const MachineGenerator& gen, long double gamma, long double tol = 1e-17L);

struct FdCumulants {
  long double J;
  long double Delta;
};

/// Central differences of lambda(gamma) at step eps and eps/2, combined by
/// Richardson extrapolation.
FdCumulants lambda_fd_cumulants(const MachineGenerator& gen, long double eps = 1e-4L);

}  // namespace qzrp
