#include "doctest.h"

#include <cmath>

#include "fsorf/e2e_stats.hpp"
#include "fsorf/errors.hpp"
#include "fsorf/metrics.hpp"
#include "fsorf/montecarlo.hpp"

using namespace fsorf;

namespace {

double db(double x) { return std::pow(10.0, x / 10.0); }

SystemConfig system(double xi, int r, double mu_db) {
  SystemConfig s;
  s.fso.alpha = 2.4;
  s.fso.beta = 2;
  s.fso.g = 0.5;
  s.fso.omega = 1.0;
  s.fso.xi = xi;
  s.fso.r = r;
  s.fso.mu_r = db(mu_db);
  s.mean_sir = db(20.0);
  s.rf_desired = {2.5, 1.09, 2, s.mean_sir};
  s.rf_interf = {1.5, 3.5, 2, 1.0};
  s.relay = FixedGain{1.7};
  return s;
}

SystemConfig csi(SystemConfig s) {
  s.relay = CsiAssisted{};
  return s;
}

}  // namespace

TEST_CASE("fixed-gain CDF against the conditional-integral oracle") {
  // Frozen from a tanh-sinh evaluation of int F1(x (1 + C/y)) f2(y) dy.
  const SystemConfig s = system(1.1, 2, 30.0);
  CHECK(fixed_gain_cdf(s, 1.0) == doctest::Approx(0.07393800).epsilon(1e-6));
  CHECK(fixed_gain_cdf(s, 10.0) == doctest::Approx(0.18403613).epsilon(1e-6));
  CHECK(fixed_gain_cdf(s, 100.0) == doctest::Approx(0.40085349).epsilon(1e-6));
  CHECK(outage_fixed(s, 10.0).value == doctest::Approx(fixed_gain_cdf(s, 10.0)).epsilon(1e-12));
}

TEST_CASE("fixed-gain outage is a CDF in the threshold") {
  const SystemConfig s = system(6.8, 1, 20.0);
  double prev = 0.0;
  for (double x : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const double F = outage_fixed(s, x).value;
    CHECK(F >= prev);
    CHECK(F <= 1.0);
    prev = F;
  }
}

TEST_CASE("min-bound outage factorizes over independent hops") {
  for (int r : {1, 2})
    for (double mu : {10.0, 40.0}) {
      const SystemConfig s = csi(system(1.1, r, mu));
      const FsoLaw fso(s.fso);
      const SirLaw sir(rf_params(s));
      for (double x : {1.0, 10.0, 100.0}) {
        const double want = 1.0 - fso.ccdf(x).value * sir.ccdf(x).value;
        CHECK(outage_csi(s, x).value == doctest::Approx(want).epsilon(1e-7));
        CHECK(csi_min_cdf(s, x) == doctest::Approx(want).epsilon(1e-7));
      }
    }
}

TEST_CASE("CSI BER matches the CDF integral of the min bound") {
  // BER = phi/(2 G(p)) sum_j q_j^p int e^{-q_j x} x^{p-1} F(x) dx, trapezoid in log x,
  // with F built from the two hop laws.
  const SystemConfig s = csi(system(6.8, 1, 20.0));
  const FsoLaw fso(s.fso);
  const SirLaw sir(rf_params(s));
  for (const char* name : {"bpsk", "dbpsk"}) {
    const auto mod = modulation(name);
    const double lo = -25.0, hi = std::log(80.0);
    const int n = 1500;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = std::exp(lo + i * h);
      const double F = 1.0 - fso.ccdf(x).value * sir.ccdf(x).value;
      double k = 0.0;
      for (double q : mod.q) k += std::pow(q, mod.p) * std::exp(-q * x);
      acc += (i == 0 || i == n ? 0.5 : 1.0) * k * std::pow(x, mod.p) * F;
    }
    const double want = mod.phi / (2 * std::tgamma(mod.p)) * acc * h;
    CHECK(ber_csi(s, mod).value == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("CSI capacity agrees with the complementary-MGF integral") {
  for (int r : {1, 2})
    for (double mu : {0.0, 20.0, 50.0}) {
      const SystemConfig s = csi(system(1.1, r, mu));
      CHECK(capacity_csi(s).value == doctest::Approx(capacity_csi_cmgf_quadrature(s).value).epsilon(1e-6));
    }
}

TEST_CASE("Gamma-Gamma/Nakagami special cases") {
  SystemConfig s = system(1.1, 1, 30.0);
  s.fso.g = 0.0;
  s.rf_desired.kappa = s.rf_interf.kappa = 1e4;
  CHECK(capacity_fixed_gg_nakagami(s).value == doctest::Approx(capacity_fixed(s).value).epsilon(1e-5));
  const SystemConfig c = csi(s);
  CHECK(capacity_csi_nakagami(c).value == doctest::Approx(capacity_csi(c).value).epsilon(1e-5));
  SystemConfig im = s;
  im.fso.r = 2;
  CHECK_THROWS(capacity_fixed_gg_nakagami(im));
}

TEST_CASE("high-SNR expansions approach the exact curves") {
  const SystemConfig s = system(6.8, 2, 50.0);
  const double gth = 10.0;
  const double exact = outage_fixed(s, gth).value;
  CHECK(std::abs(outage_fixed_asymptotic(s, gth).value - exact) / exact < 0.1);
  const auto bpsk = modulation("bpsk");
  const double ber = ber_fixed(s, bpsk).value;
  CHECK(std::abs(ber_fixed_asymptotic(s, bpsk).value - ber) / ber < 0.1);
}

TEST_CASE("diversity order readings") {
  CHECK(diversity_gain(system(1.1, 2, 0)) == doctest::Approx(0.605));
  CHECK(diversity_gain(system(6.8, 2, 0)) == doctest::Approx(1.0));
  // Heterodyne: the RF shadowing term kappa = 1.09 is the smallest.
  CHECK(diversity_gain(system(6.8, 1, 0)) == doctest::Approx(1.09));
  CHECK(diversity_gain(system(6.8, 2, 0), DiversityReading::SmallestActiveK) == doctest::Approx(0.5));
}

TEST_CASE("metrics move the right way with SNR") {
  const auto bpsk = modulation("bpsk");
  double last_ber = 1.0, last_cap = 0.0;
  for (double mu : {0.0, 15.0, 30.0, 45.0}) {
    const SystemConfig s = system(6.8, 1, mu);
    const double b = ber_fixed(s, bpsk).value;
    const double c = capacity_fixed(s).value;
    CHECK(b < last_ber);
    CHECK(b > 0.0);
    CHECK(c > last_cap);
    last_ber = b;
    last_cap = c;
  }
  CHECK(last_ber < bpsk.zero_snr_ber());
}

TEST_CASE("closed forms agree with a short Monte-Carlo run") {
  SimPlan plan;
  plan.config = system(1.1, 1, 20.0);
  plan.n_samples = 200000;
  plan.seed = 99;
  plan.gamma_th = 10.0;
  plan.modulation = modulation("bpsk");
  const SimResult mc = simulate(plan);
  auto within = [](double a, const MetricEstimate& e) { return std::abs(a - e.value) < 4.5 * *e.std_err; };
  CHECK(within(outage_fixed(plan.config, 10.0).value, *mc.outage));
  CHECK(within(ber_fixed(plan.config, plan.modulation).value, *mc.ber));
  CHECK(within(capacity_fixed(plan.config).value, *mc.capacity));
}

TEST_CASE("modulation table") {
  const auto b = modulation("BPSK");
  CHECK(b.conditional_ber(2.0) == doctest::Approx(0.5 * std::erfc(std::sqrt(2.0))).epsilon(1e-14));
  const auto d = modulation("dbpsk");
  CHECK(d.conditional_ber(2.0) == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(modulation_table().size() == 5);
  CHECK_THROWS_AS(modulation("qam1024"), ConfigError);
}
