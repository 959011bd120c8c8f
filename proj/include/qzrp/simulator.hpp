#pragma once

// Continuous-time Monte Carlo of the q-boson ZRP on a ring.
//
// Each occupied site i fires at rate u(n_i) and sends one particle to
// i+1 (mod N); the integrated current Y counts all jumps.

#include <cstdint>
#include <string_view>
#include <vector>

namespace qzrp {

enum class SimInit { stationary, all_equal, single_pile };

SimInit parse_sim_init(std::string_view name);
std::string_view sim_init_name(SimInit init);

struct SimConfig {
  int N = 1;
  int p = 1;
  double q = 0.0;
  double t_burn = 0.0;     // <= 0 selects the default 10 N^2
  double t_measure = 1.0;
  int reps = 2;
  std::uint64_t seed = 0;
  SimInit init = SimInit::stationary;
  int batches = 20;        // within-trajectory batch-means diagnostic
  unsigned threads = 0;    // 0: hardware concurrency

  double burn_in() const { return t_burn > 0 ? t_burn : 10.0 * N * N; }
};

struct Trajectory {
  std::int64_t Y_burn = 0;    // Y at t_burn
  std::int64_t Y_end = 0;     // Y at t_burn + t_measure
  std::int64_t events = 0;
  std::vector<std::int64_t> batch_counts;  // jumps per measurement batch
  double max_rate_drift = 0.0;  // largest relative drift of the incremental total rate
  int rate_resyncs = 0;
  std::vector<int> final_config;
};

struct SimEstimate {
  double J_hat = 0.0;
  double se_J = 0.0;
  double Delta_hat = 0.0;
  double se_Delta = 0.0;
  double Delta_batch = 0.0;  // batch-means diagnostic, averaged over replicas
  int reps = 0;
  std::int64_t total_events = 0;
  std::uint64_t seed = 0;
};

/// Per-replica 64-bit stream seed mixed from (seed, rep_index).
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t rep_index);

/// Rates u(0..p) in double precision.
std::vector<double> rate_table(int p, double q);

/// Initial occupation vector drawn according to cfg.init.
std::vector<int> initial_configuration(const SimConfig& cfg, std::uint64_t stream_seed);

Trajectory run_trajectory(const SimConfig& cfg, int rep_index);

SimEstimate estimate_cumulants(const SimConfig& cfg);

/// Time-weighted histogram of site 0's occupation over [t_burn, t_burn + t_measure]
/// of replica 0, normalized to a probability vector over 0..p.
std::vector<double> occupation_histogram(const SimConfig& cfg);

}  // namespace qzrp
