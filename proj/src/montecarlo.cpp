#include "fsorf/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "fsorf/errors.hpp"

namespace fsorf {

namespace {

constexpr int kShards = 64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

long long shard_size(long long n, int shard) {
  return n / kShards + (shard < n % kShards ? 1 : 0);
}

// Running sums of one quantity.
struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

struct Tally {
  Moments outage, ber, capacity;
  void add(double g, const SimPlan& plan) {
    if (plan.outage) outage.add(g < plan.gamma_th ? 1.0 : 0.0);
    if (plan.ber) ber.add(plan.modulation.conditional_ber(g));
    if (plan.capacity) capacity.add(0.5 * std::log2(1.0 + g));
  }
  void merge(const Tally& o) {
    outage.merge(o.outage);
    ber.merge(o.ber);
    capacity.merge(o.capacity);
  }
};

MetricEstimate mean_estimate(const Moments& m, long long n) {
  const double nn = static_cast<double>(n);
  const double mean = m.sum / nn;
  const double var = std::max(0.0, m.sum_sq / nn - mean * mean);
  MetricEstimate e;
  e.value = mean;
  e.method = Method::MonteCarlo;
  // Never report a zero band: a constant sample still has 1/n resolution.
  e.std_err = std::max(std::sqrt(var * nn / (nn - 1.0) / nn), 1.0 / nn);
  return e;
}

MetricEstimate binomial_estimate(const Moments& m, long long n) {
  const double nn = static_cast<double>(n);
  const double p = m.sum / nn;
  MetricEstimate e;
  e.value = p;
  e.method = Method::MonteCarlo;
  e.std_err = std::max(std::sqrt(p * (1.0 - p) / nn), 1.0 / nn);
  return e;
}

void fill(SimResult& out, const Tally& t, long long n, const SimPlan& plan, bool bound) {
  auto& o = bound ? out.outage_min : out.outage;
  auto& b = bound ? out.ber_min : out.ber;
  auto& c = bound ? out.capacity_min : out.capacity;
  if (plan.outage) o = binomial_estimate(t.outage, n);
  if (plan.ber) b = mean_estimate(t.ber, n);
  if (plan.capacity) c = mean_estimate(t.capacity, n);
}

// Runs body(shard, rng) for every shard on up to `threads` workers.
template <class Body>
void run_shards(int threads, std::uint64_t seed, Body&& body) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < kShards; s = next++) {
      Rng rng(shard_seed(seed, static_cast<std::uint64_t>(s)));
      body(s, rng);
    }
  };
  const int n = std::clamp(threads, 1, kShards);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

int plan_threads(const SimPlan& plan) { return plan.threads > 0 ? plan.threads : default_threads(); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_samples(const std::vector<double>& samples) {
  if (samples.empty()) throw DomainError("no samples");
}

}  // namespace

std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
  return splitmix64(splitmix64(seed) ^ splitmix64(shard + 0x632be59bd9b4e019ULL));
}

int default_threads() {
  if (const char* env = std::getenv("FSORF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void SimPlan::validate() const {
  config.validate();
  if (n_samples < kMinSamples)
    throw ConfigError("Monte-Carlo needs at least " + std::to_string(kMinSamples) + " samples");
  if (!(outage || ber || capacity)) throw ConfigError("Monte-Carlo plan selects no metric");
  if (outage && !(gamma_th > 0.0)) throw ConfigError("gamma_th must be positive");
  if (ber) modulation.validate();
}

SimResult simulate_fixed_gain(const SimPlan& plan) {
  plan.validate();
  if (!plan.config.fixed_gain()) throw DomainError("simulate_fixed_gain needs a fixed-gain relay");
  const auto t0 = std::chrono::steady_clock::now();
  const MalagaSampler fso(plan.config.fso);
  const double C = plan.config.gain();
  std::vector<Tally> tallies(kShards);
  run_shards(plan_threads(plan), plan.seed, [&](int s, Rng& rng) {
    Tally t;
    for (long long i = shard_size(plan.n_samples, s); i > 0; --i) {
      const double g1 = fso(rng);
      const double g2 = sample_sir(plan.config, rng);
      t.add(g1 * g2 / (g2 + C), plan);
    }
    tallies[s] = t;
  });
  Tally total;
  for (const auto& t : tallies) total.merge(t);
  SimResult out;
  fill(out, total, plan.n_samples, plan, false);
  out.n_samples = plan.n_samples;
  out.seed = plan.seed;
  out.wall_seconds = elapsed(t0);
  return out;
}

SimResult simulate_csi(const SimPlan& plan) {
  plan.validate();
  if (plan.config.fixed_gain()) throw DomainError("simulate_csi needs a CSI-assisted relay");
  const auto t0 = std::chrono::steady_clock::now();
  const MalagaSampler fso(plan.config.fso);
  std::vector<Tally> exact(kShards), bound(kShards);
  run_shards(plan_threads(plan), plan.seed, [&](int s, Rng& rng) {
    Tally te, tb;
    for (long long i = shard_size(plan.n_samples, s); i > 0; --i) {
      const double g1 = fso(rng);
      const double g2 = sample_sir(plan.config, rng);
      te.add(g1 * g2 / (g1 + g2 + 1.0), plan);
      tb.add(std::min(g1, g2), plan);
    }
    exact[s] = te;
    bound[s] = tb;
  });
  Tally te, tb;
  for (int s = 0; s < kShards; ++s) {
    te.merge(exact[s]);
    tb.merge(bound[s]);
  }
  SimResult out;
  fill(out, te, plan.n_samples, plan, false);
  fill(out, tb, plan.n_samples, plan, true);
  out.n_samples = plan.n_samples;
  out.seed = plan.seed;
  out.wall_seconds = elapsed(t0);
  return out;
}

SimResult simulate(const SimPlan& plan) {
  return plan.config.fixed_gain() ? simulate_fixed_gain(plan) : simulate_csi(plan);
}

MetricEstimate estimate_outage(const std::vector<double>& samples, double gamma_th) {
  require_samples(samples);
  Moments m;
  for (double g : samples) m.add(g < gamma_th ? 1.0 : 0.0);
  return binomial_estimate(m, static_cast<long long>(samples.size()));
}

MetricEstimate estimate_ber(const std::vector<double>& samples, const ModulationScheme& mod) {
  require_samples(samples);
  mod.validate();
  Moments m;
  for (double g : samples) m.add(mod.conditional_ber(g));
  return mean_estimate(m, static_cast<long long>(samples.size()));
}

MetricEstimate estimate_capacity(const std::vector<double>& samples) {
  require_samples(samples);
  Moments m;
  for (double g : samples) m.add(0.5 * std::log2(1.0 + std::max(g, 0.0)));
  return mean_estimate(m, static_cast<long long>(samples.size()));
}

std::vector<double> sample_fixed_gain(const SystemConfig& cfg, long long n, std::uint64_t seed) {
  cfg.validate();
  if (!cfg.fixed_gain()) throw DomainError("sample_fixed_gain needs a fixed-gain relay");
  if (n < 1) throw DomainError("sample count must be positive");
  const MalagaSampler fso(cfg.fso);
  const double C = cfg.gain();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < kShards; ++s) {
    Rng rng(shard_seed(seed, static_cast<std::uint64_t>(s)));
    for (long long i = shard_size(n, s); i > 0; --i) {
      const double g1 = fso(rng);
      const double g2 = sample_sir(cfg, rng);
      out.push_back(g1 * g2 / (g2 + C));
    }
  }
  return out;
}

CsiSamples sample_csi(const SystemConfig& cfg, long long n, std::uint64_t seed) {
  cfg.validate();
  if (n < 1) throw DomainError("sample count must be positive");
  const MalagaSampler fso(cfg.fso);
  CsiSamples out;
  out.exact.reserve(static_cast<std::size_t>(n));
  out.min_bound.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < kShards; ++s) {
    Rng rng(shard_seed(seed, static_cast<std::uint64_t>(s)));
    for (long long i = shard_size(n, s); i > 0; --i) {
      const double g1 = fso(rng);
      const double g2 = sample_sir(cfg, rng);
      out.exact.push_back(g1 * g2 / (g1 + g2 + 1.0));
      out.min_bound.push_back(std::min(g1, g2));
    }
  }
  return out;
}

}  // namespace fsorf
