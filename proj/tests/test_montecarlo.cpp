#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <set>

#include "fsorf/errors.hpp"
#include "fsorf/montecarlo.hpp"

using namespace fsorf;

namespace {

SystemConfig base() {
  SystemConfig s;
  s.fso.alpha = 2.4;
  s.fso.beta = 2;
  s.fso.g = 0.5;
  s.fso.xi = 6.8;
  s.fso.mu_r = 100.0;
  s.mean_sir = 100.0;
  s.rf_desired = {2.5, 1.09, 2, 100.0};
  s.rf_interf = {1.5, 3.5, 2, 1.0};
  s.relay = FixedGain{1.7};
  return s;
}

}  // namespace

TEST_CASE("estimators on known samples") {
  const std::vector<double> x{0.5, 1.5, 2.5, 3.5};
  const auto o = estimate_outage(x, 2.0);
  CHECK(o.value == 0.5);
  CHECK(*o.std_err == doctest::Approx(std::sqrt(0.25 / 4)));
  CHECK(o.method == Method::MonteCarlo);
  // No outage event: the standard error is floored at 1/n, never zero.
  CHECK(*estimate_outage(x, 0.1).std_err == doctest::Approx(0.25));
  const auto c = estimate_capacity({1.0, 3.0});
  CHECK(c.value == doctest::Approx(0.25 * (std::log2(2.0) + std::log2(4.0))));
  CHECK_THROWS(estimate_capacity({}));
}

TEST_CASE("results do not depend on the thread count") {
  SimPlan p;
  p.config = base();
  p.n_samples = 50000;
  p.seed = 5;
  p.threads = 1;
  const SimResult a = simulate(p);
  p.threads = 3;
  const SimResult b = simulate(p);
  CHECK(a.outage->value == b.outage->value);
  CHECK(a.ber->value == b.ber->value);
  CHECK(a.capacity->value == b.capacity->value);
  p.seed = 6;
  CHECK(simulate(p).capacity->value != a.capacity->value);
}

TEST_CASE("CSI simulation reports the exact SINR and the min bound") {
  SimPlan p;
  p.config = base();
  p.config.relay = CsiAssisted{};
  p.n_samples = 20000;
  const SimResult r = simulate(p);
  REQUIRE(r.outage_min);
  // The exact SINR never exceeds min(gamma_1, gamma_2).
  CHECK(r.outage->value >= r.outage_min->value);
  CHECK(r.capacity->value <= r.capacity_min->value);
  const auto s = sample_csi(p.config, 1000, 3);
  for (std::size_t i = 0; i < s.exact.size(); ++i) CHECK(s.exact[i] <= s.min_bound[i]);
}

TEST_CASE("raw samples are reproducible") {
  const auto a = sample_fixed_gain(base(), 5000, 17);
  const auto b = sample_fixed_gain(base(), 5000, 17);
  CHECK(a == b);
  CHECK(a.size() == 5000);
}

TEST_CASE("shard seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 64; ++i) seen.insert(shard_seed(1, i));
  CHECK(seen.size() == 64);
  CHECK(shard_seed(1, 0) != shard_seed(2, 0));
}

TEST_CASE("plan validation") {
  SimPlan p;
  p.config = base();
  p.n_samples = kMinSamples - 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n_samples = kMinSamples;
  CHECK_NOTHROW(p.validate());
  p.outage = p.ber = p.capacity = false;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("FSORF_THREADS sets the default thread count") {
  setenv("FSORF_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  setenv("FSORF_THREADS", "junk", 1);
  CHECK(default_threads() >= 1);
  unsetenv("FSORF_THREADS");
  CHECK(default_threads() >= 1);
}
