#include "qzrp/spectral_oracle.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace qzrp {

std::size_t config_count(int N, int p) {
  // C(N+p-1, p) with saturation.
  const std::size_t max = std::numeric_limits<std::size_t>::max();
  std::size_t c = 1;
  const int k = std::min(p, N - 1);
  const int n = N + p - 1;
  for (int i = 1; i <= k; ++i) {
    const std::size_t num = static_cast<std::size_t>(n - k + i);
    if (c > max / num) return max;
    c = c * num / static_cast<std::size_t>(i);
  }
  return c;
}

ConfigSpace::ConfigSpace(int N, int p, std::size_t cap) : N_(N), p_(p) {
  if (N < 1 || p < 0) throw DomainError("configuration space needs N >= 1, p >= 0");
  const std::size_t M = config_count(N, p);
  if (M > cap) {
    throw DomainError("state space of " + std::to_string(M) + " configurations exceeds the cap of " +
                      std::to_string(cap));
  }
  configs_.reserve(M);
  std::vector<int> current(N, 0);
  // Lexicographic: site 0 varies slowest, ascending.
  auto fill = [&](auto&& self, int site, int left) -> void {
    if (site == N - 1) {
      current[site] = left;
      configs_.push_back(current);
      return;
    }
    for (int m = 0; m <= left; ++m) {
      current[site] = m;
      self(self, site + 1, left - m);
    }
  };
  fill(fill, 0, p);
  for (std::size_t i = 0; i < configs_.size(); ++i) index_.emplace(configs_[i], i);
}

std::size_t ConfigSpace::index_of(const std::vector<int>& config) const {
  const auto it = index_.find(config);
  if (it == index_.end()) throw DomainError("configuration not in the state space");
  return it->second;
}

std::vector<double> solve_bordered(const GeneratorPair<double>& gen, const std::vector<double>& rhs,
                                   double border) {
  const auto M = static_cast<Eigen::Index>(gen.space.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(gen.jumps.size() + 3 * gen.space.size());
  for (const auto& j : gen.jumps)
    entries.emplace_back(static_cast<Eigen::Index>(j.to), static_cast<Eigen::Index>(j.from), j.rate);
  for (Eigen::Index s = 0; s < M; ++s) {
    entries.emplace_back(s, s, -gen.exit_rate[static_cast<std::size_t>(s)]);
    entries.emplace_back(s, M, 1.0);
    entries.emplace_back(M, s, 1.0);
  }
  Eigen::SparseMatrix<double> A(M + 1, M + 1);
  A.setFromTriplets(entries.begin(), entries.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization of the generator failed");
  Eigen::VectorXd b(M + 1);
  for (Eigen::Index s = 0; s < M; ++s) b[s] = rhs[static_cast<std::size_t>(s)];
  b[M] = border;
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  return std::vector<double>(x.data(), x.data() + M);
}

long double lambda_gamma(const MachineGenerator& gen, long double gamma, long double tol) {
  const std::size_t M = gen.states;
  long double shift = 1.0L;
  for (auto r : gen.exit_rate) shift = std::max(shift, r + 1.0L);
  const long double tilt = std::exp(gamma);

  std::vector<long double> v(M, 1.0L / static_cast<long double>(M)), y(M);
  for (int it = 0; it < 5'000'000; ++it) {
    for (std::size_t s = 0; s < M; ++s) y[s] = (shift - gen.exit_rate[s]) * v[s];
    for (const auto& j : gen.jumps) y[j.to] += tilt * j.rate * v[j.from];
    long double lo = std::numeric_limits<long double>::infinity();
    long double hi = -lo;
    long double total = 0.0L;
    for (std::size_t s = 0; s < M; ++s) {
      const long double ratio = y[s] / v[s];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      total += y[s];
    }
    if (hi - lo <= tol * hi) return (hi + lo) / 2.0L - shift;
    for (std::size_t s = 0; s < M; ++s) v[s] = y[s] / total;
  }
  throw SolverError("lambda_gamma: power iteration did not converge");
}

FdCumulants lambda_fd_cumulants(const MachineGenerator& gen, long double eps) {
  auto first = [&](long double h) { return (lambda_gamma(gen, h) - lambda_gamma(gen, -h)) / (2.0L * h); };
  // lambda(0) = 0 exactly for a stochastic generator.
  auto second = [&](long double h) { return (lambda_gamma(gen, h) + lambda_gamma(gen, -h)) / (h * h); };
  const long double J = (4.0L * first(eps / 2.0L) - first(eps)) / 3.0L;
  const long double Delta = (4.0L * second(eps / 2.0L) - second(eps)) / 3.0L;
  return FdCumulants{J, Delta};
}

}  // namespace qzrp
