#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "fsorf/errors.hpp"
#include "fsorf/specfun.hpp"

using namespace fsorf;
using namespace fsorf::specfun;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

FoxHSpec single(double b, double B) {
  FoxHSpec s;
  s.m = 1;
  s.lower = {{b, B}};
  return s;
}

}  // namespace

TEST_CASE("log gamma: real axis and reference complex values") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 33.3, 170.5})
    CHECK(std::abs(log_gamma_complex({x, 0.0}).real() - std::lgamma(x)) < 1e-13 * (1 + std::abs(std::lgamma(x))));
  // Negative non-integers: |Gamma| via reflection.
  CHECK(std::abs(std::exp(log_gamma_complex({-0.5, 0.0})).real() + 2.0 * std::sqrt(M_PI)) < 1e-12);
  // log Gamma(1 + i), principal branch.
  const auto v = log_gamma_complex({1.0, 1.0});
  CHECK(v.real() == doctest::Approx(-0.6509231993018563).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(-0.3016403204675331).epsilon(1e-14));
  // Large imaginary part: principal branch, no 2 pi jumps.
  const auto w = log_gamma_complex({0.5, 100.0});
  CHECK(w.real() == doctest::Approx(-156.16069414628497).epsilon(1e-12));
  CHECK_THROWS_AS(log_gamma_complex({-2.0, 0.0}), DomainError);
}

TEST_CASE("Bessel K against reference values") {
  CHECK(bessel_k(0.0, 1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-13));
  CHECK(bessel_k(1.0, 2.0) == doctest::Approx(0.13986588181652243).epsilon(1e-13));
  for (double x : {0.05, 0.7, 3.0, 40.0})
    CHECK(rel(bessel_k(0.5, x), std::sqrt(M_PI / (2 * x)) * std::exp(-x)) < 1e-12);
  for (double nu : {0.3, 1.7, 4.2})
    for (double x : {0.2, 1.0, 9.0}) CHECK(rel(bessel_k(nu, x), boost::math::cyl_bessel_k(nu, x)) < 1e-12);
}

TEST_CASE("Fox-H elementary reductions") {
  for (double z : {0.01, 0.1, 1.0, 10.0, 60.0}) {
    CAPTURE(z);
    CHECK(rel(fox_h(single(0.0, 1.0), z).value, std::exp(-z)) < 1e-9);
    CHECK(rel(fox_h(single(0.0, 2.0), z).value, 0.5 * std::exp(-std::sqrt(z))) < 1e-9);
    // z^b e^{-z}
    CHECK(rel(fox_h(single(1.5, 1.0), z).value, std::pow(z, 1.5) * std::exp(-z)) < 1e-9);
    FoxHSpec pw;
    pw.m = pw.n = 1;
    pw.upper = {{1.0 - 2.3, 1.0}};
    pw.lower = {{0.0, 1.0}};
    CHECK(rel(fox_h(pw, z).value, std::tgamma(2.3) * std::pow(1 + z, -2.3)) < 1e-9);
  }
}

TEST_CASE("Meijer-G: Bessel K and lower incomplete gamma") {
  for (double z : {0.1, 1.0, 10.0}) {
    const double nu = 1.3;
    // G^{2,0}_{0,2}[z | nu/2, -nu/2] = 2 K_nu(2 sqrt z)
    CHECK(rel(meijer_g(meijer_spec(2, 0, {}, {nu / 2, -nu / 2}), z).value,
              2 * boost::math::cyl_bessel_k(nu, 2 * std::sqrt(z))) < 1e-9);
    // G^{1,1}_{1,2}[z | 1; a, 0] = gamma(a, z) lower incomplete
    const double a = 2.7;
    CHECK(rel(meijer_g(meijer_spec(1, 1, {1.0}, {a, 0.0}), z).value,
              std::tgamma(a) * boost::math::gamma_p(a, z)) < 1e-9);
  }
}

TEST_CASE("Fox-H with unit scales reproduces Meijer-G") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(-0.8, 0.6), ub(0.1, 1.4), uz(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const int q = 2 + static_cast<int>(rng() % 3);
    const int p = static_cast<int>(rng() % q);
    const int m = 1 + static_cast<int>(rng() % q);
    const int n = p ? static_cast<int>(rng() % (p + 1)) : 0;
    if (2 * (m + n) <= p + q) continue;
    std::vector<double> a(p), b(q);
    for (auto& v : a) v = ua(rng);
    for (auto& v : b) v = ub(rng);
    const double z = std::pow(10.0, uz(rng));
    const auto spec = meijer_spec(m, n, a, b);
    CHECK(rel(fox_h(spec, z).value, meijer_g(spec, z).value) < 1e-8);
  }
}

TEST_CASE("pole strip and contour placement") {
  FoxHSpec s;
  s.m = s.n = 1;
  s.upper = {{0.0, 1.0}};  // n-type: Gamma(1 - s), poles at 1, 2, ...
  s.lower = {{0.5, 1.0}};  // m-type: Gamma(0.5 + s), poles at -0.5, -1.5, ...
  const Strip st = fox_h_strip(s);
  CHECK(st.lo == doctest::Approx(-0.5));
  CHECK(st.hi == doctest::Approx(1.0));
  const double c = fox_h_contour(s, 3.0);
  CHECK(c > st.lo);
  CHECK(c < st.hi);
  // An explicit shift inside the strip does not change the value.
  FoxHSpec t = s;
  t.contour_shift = 0.7;
  CHECK(rel(fox_h(t, 3.0).value, fox_h(s, 3.0).value) < 1e-10);
}

TEST_CASE("contour shifted across a pole picks up its residue unless line_only") {
  // H = e^{-z}; the first pole of Gamma(s) sits at 0 with residue 1.
  FoxHSpec s = single(0.0, 1.0);
  s.contour_shift = -0.5;
  const double z = 2.0;
  CHECK(rel(fox_h(s, z).value, std::exp(-z)) < 1e-9);
  s.line_only = true;
  // Line integral left of the pole: e^{-z} - 1.
  CHECK(rel(fox_h(s, z).value, std::exp(-z) - 1.0) < 1e-9);
}

TEST_CASE("bivariate Fox-H without joint factors factorizes") {
  BivariateFoxHSpec b;
  b.first.m = 1;
  b.first.lower = {{0.0, 1.0}};
  b.second.m = 1;
  b.second.n = 1;
  b.second.upper = {{1.0 - 1.5, 1.0}};
  b.second.lower = {{0.0, 1.0}};
  for (double z1 : {0.3, 2.0})
    for (double z2 : {0.5, 4.0}) {
      const double want = std::exp(-z1) * std::tgamma(1.5) * std::pow(1 + z2, -1.5);
      CHECK(rel(fox_h_bivariate(b, z1, z2).value, want) < 1e-8);
    }
}

TEST_CASE("argument checking") {
  CHECK_THROWS_AS(fox_h(single(0.0, 1.0), 0.0), DomainError);
  CHECK_THROWS_AS(fox_h(single(0.0, 1.0), -1.0), DomainError);
  FoxHSpec bad = single(0.0, -1.0);
  CHECK_THROWS_AS(fox_h(bad, 1.0), DomainError);
  FoxHSpec scaled = single(0.0, 2.0);
  CHECK_THROWS_AS(meijer_g(scaled, 1.0), DomainError);
  // m + n < (p + q)/2 on a unit-scale spec: the line integral diverges.
  CHECK_THROWS_AS(fox_h(meijer_spec(1, 0, {0.2}, {1.5, 1.1}), 4.6), ConvergenceError);
}
