#pragma once

// Monte-Carlo estimates of outage, BER and capacity from sampled hop SNRs.
// Work is split into a fixed number of shards with seeds derived from
// (seed, shard index), so results do not depend on the thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "fsorf/channels.hpp"
#include "fsorf/metrics.hpp"

namespace fsorf {

inline constexpr long long kMinSamples = 10000;

struct SimPlan {
  SystemConfig config;
  long long n_samples = 1000000;
  std::uint64_t seed = 1;
  bool outage = true;
  bool ber = true;
  bool capacity = true;
  double gamma_th = 10.0;  // linear
  ModulationScheme modulation;
  int threads = 0;  // 0: default_threads()

  void validate() const;
};

struct SimResult {
  // End-to-end SINR: the fixed-gain ratio or the exact CSI-assisted SINR.
  std::optional<MetricEstimate> outage, ber, capacity;
  // CSI-assisted only: the min(gamma_1, gamma_2) bound.
  std::optional<MetricEstimate> outage_min, ber_min, capacity_min;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

SimResult simulate_fixed_gain(const SimPlan& plan);
SimResult simulate_csi(const SimPlan& plan);
/// Dispatches on the relay type.
SimResult simulate(const SimPlan& plan);

MetricEstimate estimate_outage(const std::vector<double>& samples, double gamma_th);
MetricEstimate estimate_ber(const std::vector<double>& samples, const ModulationScheme& mod);
MetricEstimate estimate_capacity(const std::vector<double>& samples);

/// Raw end-to-end samples, drawn shard by shard exactly as the simulators do.
std::vector<double> sample_fixed_gain(const SystemConfig& cfg, long long n, std::uint64_t seed);
struct CsiSamples {
  std::vector<double> exact, min_bound;
};
CsiSamples sample_csi(const SystemConfig& cfg, long long n, std::uint64_t seed);

/// FSORF_THREADS if set and positive, else the hardware concurrency.
int default_threads();

/// Seed of shard i: splitmix64 applied to (seed, i).
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard);

}  // namespace fsorf
