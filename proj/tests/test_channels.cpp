#include "doctest.h"

#include <cmath>
#include <numeric>

#include "fsorf/channels.hpp"
#include "fsorf/e2e_stats.hpp"
#include "fsorf/errors.hpp"

using namespace fsorf;

namespace {

MalagaLink strong(double xi, int r) {
  MalagaLink l;
  l.alpha = 2.4;
  l.beta = 2;
  l.g = 0.5;
  l.omega = 1.0;
  l.xi = xi;
  l.r = r;
  return l;
}

}  // namespace

TEST_CASE("Malaga mixture weights sum to one") {
  for (double alpha : {2.4, 4.2, 5.4, 11.0})
    for (int beta : {1, 2, 3, 4, 8})
      for (double g : {0.05, 0.5, 1.3}) {
        MalagaLink l = strong(6.8, 1);
        l.alpha = alpha;
        l.beta = beta;
        l.g = g;
        const auto d = derive_constants(l);
        CAPTURE(alpha);
        CAPTURE(beta);
        CAPTURE(g);
        CHECK(std::accumulate(d.weight.begin(), d.weight.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.b.size() == static_cast<std::size_t>(beta));
      }
}

TEST_CASE("Malaga constants for the strong-turbulence set") {
  const auto d = derive_constants(strong(1.1, 1));
  // h = xi^2/(xi^2 + 1), B = alpha beta h (g + Omega)/(g beta + Omega)
  CHECK(d.h == doctest::Approx(1.21 / 2.21).epsilon(1e-15));
  CHECK(d.B == doctest::Approx(2.4 * 2 * (1.21 / 2.21) * 1.5 / 2.0).epsilon(1e-14));
  // Mixture weights from term-by-term integration of the density (mpmath).
  CHECK(d.weight[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.weight[1] == doctest::Approx(0.5).epsilon(1e-12));
  MalagaLink l = strong(1.1, 1);
  l.alpha = 4.2;
  l.beta = 3;
  l.g = 0.3;
  l.omega = 0.8;
  const auto e = derive_constants(l);
  CHECK(e.weight[0] == doctest::Approx(0.280276816608997).epsilon(1e-12));
  CHECK(e.weight[1] == doctest::Approx(0.498269896193772).epsilon(1e-12));
  CHECK(e.weight[2] == doctest::Approx(0.221453287197232).epsilon(1e-12));
}

TEST_CASE("Gamma-Gamma limit keeps only k = beta") {
  MalagaLink l = strong(6.8, 1);
  l.g = 0.0;
  const auto d = link_constants(l);
  CHECK(d.gamma_gamma);
  CHECK(d.weight.back() == 1.0);
  CHECK(d.weight.front() == 0.0);
  CHECK_THROWS_AS(derive_constants(l), DomainError);
}

TEST_CASE("scattering parametrization") {
  const MalagaLink l = malaga_from_scattering(2.4, 2, 0.25, 0.5, 1.0, 6.8, 1, 10.0);
  CHECK(l.g == doctest::Approx(2 * 0.25 * 0.5));
}

TEST_CASE("link validation") {
  MalagaLink l = strong(6.8, 1);
  l.r = 3;
  CHECK_THROWS_AS(l.validate(), DomainError);
  l = strong(6.8, 1);
  l.beta = 0;
  CHECK_THROWS_AS(l.validate(), DomainError);
  l = strong(-1.0, 1);
  CHECK_THROWS_AS(l.validate(), DomainError);
  GKLink g;
  g.m = 0.2;
  CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("electrical SNR: identity for heterodyne detection") {
  const MalagaLink l = strong(6.8, 1);
  CHECK(electrical_snr(l, 42.0) == 42.0);
  MalagaLink im = strong(6.8, 2);
  CHECK(electrical_snr(im, 42.0) > 0.0);
  CHECK(electrical_snr(im, 84.0) == doctest::Approx(2 * electrical_snr(im, 42.0)));
}

TEST_CASE("sampler moments") {
  Rng rng(11);
  MalagaLink l = strong(6.8, 1);
  l.mu_r = 10.0;
  const MalagaSampler s(l);
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += s(rng);
  // Heterodyne: gamma = mu_r I with E[I] = 1.
  CHECK(sum / n == doctest::Approx(10.0).epsilon(0.01));

  GKLink g{2.5, 1.09, 2, 3.0};
  double gs = 0.0;
  for (int i = 0; i < n; ++i) gs += sample_gk_snr(g, rng);
  CHECK(gs / n == doctest::Approx(2 * 3.0).epsilon(0.01));

  double gam = 0.0;
  for (int i = 0; i < n; ++i) gam += draw_gamma(0.3, rng);
  CHECK(gam / n == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("optical CDF: limits, monotonicity, CDF + CCDF = 1") {
  for (int r : {1, 2}) {
    MalagaLink l = strong(1.1, r);
    l.mu_r = 100.0;
    const FsoLaw law(l);
    double prev = 0.0;
    for (double x : {1e-4, 1e-2, 1.0, 10.0, 100.0, 1e3, 1e5}) {
      const double F = law.cdf(x).value;
      CHECK(F >= prev - 1e-12);
      CHECK(F <= 1.0 + 1e-12);
      CHECK(F + law.ccdf(x).value == doctest::Approx(1.0).epsilon(1e-9));
      prev = F;
    }
    CHECK(law.cdf(1e-6).value < 1e-2);
    CHECK(law.cdf(1e7).value > 0.999);
  }
}

TEST_CASE("Generalized-K CDF agrees with the integrated density") {
  const GKLink g{2.5, 1.09, 2, 10.0};
  // Trapezoid in log x of the Bessel-form pdf.
  double acc = 0.0;
  const double lo = std::log(1e-8), hi = std::log(25.0);
  const int n = 20000;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = std::exp(lo + i * h);
    acc += (i == 0 || i == n ? 0.5 : 1.0) * gk_pdf(g, x) * x;
  }
  CHECK(acc * h == doctest::Approx(gk_cdf(g, 25.0)).epsilon(1e-6));
}

TEST_CASE("SIR law: CDF limits and density") {
  const RfParams rf = rf_params(GKLink{2.5, 1.09, 2, 100.0}, GKLink{1.5, 3.5, 2, 1.0}, 100.0);
  const SirLaw sir(rf);
  CHECK(sir.cdf(1e-6).value < 1e-6);
  CHECK(sir.cdf(1e8).value > 0.999);
  const double x = 50.0, dx = 1e-3 * x;
  const double fd = (sir.cdf(x + dx).value - sir.cdf(x - dx).value) / (2 * dx);
  CHECK(sir.pdf(x).value == doctest::Approx(fd).epsilon(1e-5));
  CHECK(sir.cdf(x).value + sir.ccdf(x).value == doctest::Approx(1.0).epsilon(1e-9));
}
