#include "qzrp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "qzrp/asymptotics.hpp"
#include "qzrp/errors.hpp"

namespace qzrp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate(const SimConfig& cfg) {
  if (cfg.N < 1 || cfg.p < 1) throw DomainError("simulation needs N >= 1 and p >= 1");
  if (!(cfg.q > -1.0)) throw DomainError("q must satisfy q > -1");
  if (!(cfg.t_measure > 0.0)) throw DomainError("t_measure must be positive");
  if (cfg.reps < 2) throw DomainError("at least two replicas are needed for variance estimates");
  if (cfg.batches < 2) throw DomainError("at least two batches are needed");
}

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double unbiased_variance(const std::vector<double>& x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  const double mean = s.value() / static_cast<double>(x.size());
  CompensatedSum ss;
  for (double v : x) ss.add((v - mean) * (v - mean));
  return ss.value() / static_cast<double>(x.size() - 1);
}

double mean_of(const std::vector<double>& x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

// Jackknife standard error of an estimator over replicas.
template <class Estimator>
double jackknife_se(const std::vector<double>& x, Estimator&& estimator) {
  const std::size_t n = x.size();
  std::vector<double> loo(n), rest;
  rest.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    rest.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest.push_back(x[j]);
    loo[i] = estimator(rest);
  }
  const double m = mean_of(loo);
  CompensatedSum ss;
  for (double v : loo) ss.add((v - m) * (v - m));
  return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss.value());
}

struct Observers {
  std::vector<double>* site0_time = nullptr;  // time-weighted occupation of site 0
};

Trajectory simulate(const SimConfig& cfg, int rep_index, Observers obs) {
  validate(cfg);
  const std::uint64_t stream = replica_seed(cfg.seed, static_cast<std::uint64_t>(rep_index));
  std::mt19937_64 rng(splitmix64(stream ^ 0x5bd1e995ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto rates = rate_table(cfg.p, cfg.q);
  std::vector<int> n = initial_configuration(cfg, stream);
  const int N = cfg.N;

  auto total_from_scratch = [&] {
    double r = 0.0;
    for (int v : n) r += rates[v];
    return r;
  };
  double R = total_from_scratch();

  const double t_burn = cfg.burn_in();
  const double t_end = t_burn + cfg.t_measure;
  const double batch_len = cfg.t_measure / cfg.batches;

  Trajectory out;
  out.batch_counts.assign(static_cast<std::size_t>(cfg.batches), 0);
  std::int64_t Y = 0;
  std::int64_t Y_batch_start = 0;
  int next_batch = 0;  // index of the next boundary after t_burn
  bool burned = false;
  double t = 0.0;
  std::int64_t since_resync = 0;

  auto record_site0 = [&](double from, double to) {
    if (!obs.site0_time) return;
    const double a = std::max(from, t_burn);
    const double b = std::min(to, t_end);
    if (b > a) (*obs.site0_time)[static_cast<std::size_t>(n[0])] += b - a;
  };

  // Records Y at every boundary up to `until`.
  auto cross_boundaries = [&](double until) {
    if (!burned && t_burn <= until) {
      out.Y_burn = Y;
      Y_batch_start = Y;
      burned = true;
    }
    while (burned && next_batch < cfg.batches && t_burn + (next_batch + 1) * batch_len <= until) {
      out.batch_counts[static_cast<std::size_t>(next_batch)] = Y - Y_batch_start;
      Y_batch_start = Y;
      ++next_batch;
    }
  };

  while (true) {
    std::exponential_distribution<double> wait(R);
    const double t_next = t + wait(rng);
    if (t_next >= t_end) {
      record_site0(t, t_end);
      cross_boundaries(t_end);
      break;
    }
    record_site0(t, t_next);
    cross_boundaries(t_next);
    t = t_next;

    // Site selected proportionally to u(n_i).
    const double target = unit(rng) * R;
    double acc = 0.0;
    int site = -1;
    for (int i = 0; i < N; ++i) {
      if (n[i] == 0) continue;
      acc += rates[n[i]];
      site = i;
      if (acc > target) break;
    }
    const int dest = (site + 1) % N;
    if (dest != site) {
      R -= rates[n[site]] + rates[n[dest]];
      n[site] -= 1;
      n[dest] += 1;
      R += rates[n[site]] + rates[n[dest]];
    }
    ++Y;
    ++out.events;

    if (++since_resync == 1'000'000) {
      const double exact = total_from_scratch();
      out.max_rate_drift = std::max(out.max_rate_drift, std::abs(R - exact) / exact);
      R = exact;
      ++out.rate_resyncs;
      since_resync = 0;
    }
  }
  const double exact = total_from_scratch();
  out.max_rate_drift = std::max(out.max_rate_drift, std::abs(R - exact) / exact);
  out.Y_end = Y;
  out.final_config = n;
  return out;
}

}  // namespace

SimInit parse_sim_init(std::string_view name) {
  if (name == "stationary") return SimInit::stationary;
  if (name == "all-equal") return SimInit::all_equal;
  if (name == "single-pile") return SimInit::single_pile;
  throw DomainError("unknown init '" + std::string(name) + "' (stationary, all-equal, single-pile)");
}

std::string_view sim_init_name(SimInit init) {
  switch (init) {
    case SimInit::stationary: return "stationary";
    case SimInit::all_equal: return "all-equal";
    case SimInit::single_pile: return "single-pile";
  }
  return "";
}

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t rep_index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(rep_index + 0x632be59bd9b4e019ULL));
}

std::vector<double> rate_table(int p, double q) {
  std::vector<double> u(static_cast<std::size_t>(p) + 1, 0.0);
  for (int m = 1; m <= p; ++m) u[m] = q == 1.0 ? m : (1.0 - std::pow(q, m)) / (1.0 - q);
  return u;
}

std::vector<int> initial_configuration(const SimConfig& cfg, std::uint64_t stream_seed) {
  const int N = cfg.N;
  const int p = cfg.p;
  std::vector<int> n(static_cast<std::size_t>(N), 0);
  switch (cfg.init) {
    case SimInit::single_pile:
      n[0] = p;
      return n;
    case SimInit::all_equal:
      for (int i = 0; i < N; ++i) n[i] = p / N + (i < p % N ? 1 : 0);
      return n;
    case SimInit::stationary:
      break;
  }
  if (N == 1) {
    n[0] = p;
    return n;
  }

  // Independent sites with the grand-canonical law f(m) z*^m, conditioned on
  // the total by rejection. Truncating each site at p leaves the conditional
  // law unchanged.
  const double rho = static_cast<double>(p) / N;
  const double z = saddle_point(rho, QValue<double>::make(cfg.q), 1e-13);
  const auto rates = rate_table(p, cfg.q);
  std::vector<double> logw(static_cast<std::size_t>(p) + 1, 0.0);
  for (int m = 1; m <= p; ++m) logw[m] = logw[m - 1] + std::log(z) - std::log(rates[m]);
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(logw.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = std::exp(logw[m] - top);
  std::discrete_distribution<int> site_law(w.begin(), w.end());

  std::mt19937_64 rng(splitmix64(stream_seed ^ 0x1f83d9abfb41bd6bULL));
  for (long attempt = 0; attempt < 10'000'000; ++attempt) {
    int total = 0;
    bool over = false;
    for (int i = 0; i < N; ++i) {
      n[i] = site_law(rng);
      total += n[i];
      if (total > p) { over = true; break; }
    }
    if (!over && total == p) return n;
  }
  throw SolverError("stationary initial condition: rejection sampler did not accept");
}

Trajectory run_trajectory(const SimConfig& cfg, int rep_index) {
  return simulate(cfg, rep_index, Observers{});
}

SimEstimate estimate_cumulants(const SimConfig& cfg) {
  validate(cfg);
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<Trajectory> runs(reps);

  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(reps));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) runs[r] = run_trajectory(cfg, static_cast<int>(r));
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const double T = cfg.t_measure;
  std::vector<double> W(reps);
  CompensatedSum batch_sum;
  SimEstimate est;
  for (std::size_t r = 0; r < reps; ++r) {
    W[r] = static_cast<double>(runs[r].Y_end - runs[r].Y_burn);
    est.total_events += runs[r].events;
    std::vector<double> b(runs[r].batch_counts.begin(), runs[r].batch_counts.end());
    batch_sum.add(unbiased_variance(b) / (T / cfg.batches));
  }
  est.J_hat = mean_of(W) / T;
  est.Delta_hat = unbiased_variance(W) / T;
  est.se_J = jackknife_se(W, [&](const std::vector<double>& x) { return mean_of(x) / T; });
  est.se_Delta = jackknife_se(W, [&](const std::vector<double>& x) { return unbiased_variance(x) / T; });
  est.Delta_batch = batch_sum.value() / static_cast<double>(reps);
  est.reps = cfg.reps;
  est.seed = cfg.seed;
  return est;
}

std::vector<double> occupation_histogram(const SimConfig& cfg) {
  std::vector<double> hist(static_cast<std::size_t>(cfg.p) + 1, 0.0);
  simulate(cfg, 0, Observers{&hist});
  double total = 0.0;
  for (double h : hist) total += h;
  for (double& h : hist) h /= total;
  return hist;
}

}  // namespace qzrp
