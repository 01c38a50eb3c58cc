#include "fsorf/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "fsorf/errors.hpp"

namespace fsorf {

using specfun::BivariateBlock;
using specfun::BivariateFoxHSpec;
using specfun::FoxHSpec;

namespace {

const double kLn2 = std::numbers::ln2;

// 1/G(x), zero at the poles.
double rgamma(double x) {
  if (x <= 0.0 && x == std::round(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

double checked_gamma(double x) {
  if (x <= 0.0 && std::abs(x - std::round(x)) < 1e-12)
    throw DomainError("coincident exponents in the high-SNR expansion");
  return std::tgamma(x);
}

void require_fixed(const SystemConfig& cfg) {
  cfg.validate();
  if (!cfg.fixed_gain()) throw DomainError("metric requires a fixed-gain relay");
}

void require_csi(const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.fixed_gain()) throw DomainError("metric requires a CSI-assisted relay");
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive");
}

MetricEstimate analytic(double value, double error, Method m = Method::Analytic) {
  MetricEstimate e;
  e.value = value;
  e.method = m;
  e.eval_error = error;
  return e;
}

FoxHSpec fox_spec(int m, int n, std::vector<specfun::GammaTriple> upper,
                  std::vector<specfun::GammaTriple> lower, double log_scale) {
  FoxHSpec s;
  s.m = m;
  s.n = n;
  s.upper = std::move(upper);
  s.lower = std::move(lower);
  s.log_scale = log_scale;
  return s;
}

// Trapezoid rule in u = log x over [lo, hi], halving until converged.
template <class F>
double log_trapezoid(F&& f, double lo, double hi, double rel_tol) {
  int n = 64;
  double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  double value = sum * h;
  for (int level = 0; level < 8; ++level) {
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += f(lo + (i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double refined = sum * h;
    const double diff = std::abs(refined - value);
    value = refined;
    if (level >= 1 && diff <= rel_tol * std::abs(value) + 1e-300) break;
  }
  return value;
}

// Shared pieces of the fixed-gain closed forms.
struct FixedParts {
  MalagaLink link;
  MalagaDerived d;
  RfParams rf;
  double C;
  double Br;
  std::vector<int> ks;

  explicit FixedParts(const SystemConfig& cfg)
      : link(cfg.fso), d(link_constants(cfg.fso)), rf(rf_params(cfg)), C(cfg.gain()),
        Br(std::pow(d.B, cfg.fso.r)), ks(blocks::active_terms(d)) {}

  double log_prefactor(int k) const { return blocks::fixed_log_prefactor(link, d, rf, C, k); }
  double z2() const { return C / rf.scale(); }

  BivariateFoxHSpec bivariate(BivariateBlock first, double log_scale) const {
    BivariateFoxHSpec s;
    s.n1 = 1;
    s.joint_upper = {{0.0, 1.0, 1.0}};
    s.first = std::move(first);
    s.second = blocks::fixed_rf(rf);
    s.log_scale = log_scale;
    return s;
  }

  // G^{4,4}_{5,5}[C/S | -kappa_I, -Lm_I, -1, y, 0; kappa-1, Nm-1, -1, -1, 0] times exp(ls),
  // integrated along the line just left of -1 that the RF variable runs on
  // before the optical poles are collected. Poles y-1, y-2, ... right of it
  // are not part of this term; they reappear in the joint-pole remainder.
  specfun::Evaluation xi_meijer(double y, double ls) const {
    auto spec = specfun::meijer_spec(4, 4, {-rf.kappa_i, -rf.Lm_i, -1.0, y, 0.0},
                                     {rf.kappa - 1.0, rf.Nm - 1.0, -1.0, -1.0, 0.0});
    spec.log_scale = ls;
    double below = 1.0;  // distance from -1 to the next pole on its left
    const double frac = y - std::floor(y);
    if (frac > 0.0) below = 1.0 - frac;
    spec.contour_shift = -1.0 - 0.5 * below;
    spec.line_only = true;
    return specfun::meijer_g(spec, z2());
  }

  // Coefficients of the three optical exponents y = xi^2/r, alpha/r, k/r.
  std::array<std::pair<double, double>, 3> exponents(int k) const {
    const double r = link.r, x2 = link.xi * link.xi, a = link.alpha;
    return {{{x2 / r, checked_gamma(a - x2) * checked_gamma(k - x2) * rgamma(1.0 - x2 / r) / r},
             {a / r, checked_gamma(x2 - a) * checked_gamma(k - a) * rgamma(1.0 - a / r) *
                         rgamma(1.0 + x2 - a) / r},
             {k / r, checked_gamma(x2 - k) * checked_gamma(a - k) * rgamma(1.0 - k / r) *
                         rgamma(1.0 + x2 - k) / r}}};
  }

  // Joint-pole remainder with `extra` prepended to the n-type upper list.
  specfun::Evaluation remainder(int k, double w, double ls, std::optional<double> extra) const {
    const double r = link.r, x2 = link.xi * link.xi;
    std::vector<specfun::GammaTriple> up = {{-rf.kappa_i, 1.0}, {-rf.Lm_i, 1.0}, {-1.0, 1.0}};
    if (extra) up.push_back({*extra, 1.0});
    const int n = static_cast<int>(up.size());
    up.push_back({0.0, 1.0});
    up.push_back({1.0 + x2 - r, r});
    up.push_back({0.0, 1.0});
    return specfun::fox_h(fox_spec(7, n, up,
                                   {{x2 - r, r}, {link.alpha - r, r}, {k - r, r}, {rf.kappa - 1.0, 1.0},
                                    {rf.Nm - 1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0}},
                                   ls),
                          w);
  }
};

}  // namespace

// --- modulation ----------------------------------------------------------------------

void ModulationScheme::validate() const {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw ConfigError("modulation: phi must be > 0");
  if (n < 1) throw ConfigError("modulation: n must be >= 1");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("modulation: p must be > 0");
  if (static_cast<int>(q.size()) != n) throw ConfigError("modulation: q must hold n entries");
  for (double v : q)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("modulation: q_j must be > 0");
}

double ModulationScheme::conditional_ber(double gamma) const {
  double acc = 0.0;
  for (double qj : q) acc += boost::math::gamma_q(p, qj * std::max(gamma, 0.0));
  return 0.5 * phi * acc;
}

const std::vector<ModulationScheme>& modulation_table() {
  static const std::vector<ModulationScheme> table = {
      {"bpsk", 1.0, 1, 0.5, {1.0}},   {"qpsk", 1.0, 1, 0.5, {0.5}},
      {"cbfsk", 1.0, 1, 0.5, {0.5}},  {"dbpsk", 1.0, 1, 1.0, {1.0}},
      {"ncbfsk", 1.0, 1, 1.0, {0.5}},
  };
  return table;
}

ModulationScheme modulation(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& row : modulation_table())
    if (row.name == key) return row;
  throw ConfigError("unknown modulation '" + name + "'", 0, "modulation");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Analytic: return "analytic";
    case Method::Asymptotic: return "asymptotic";
    case Method::MonteCarlo: return "mc";
  }
  return "?";
}

double ber_from_cdf(const std::function<double(double)>& cdf, const ModulationScheme& mod) {
  mod.validate();
  double total = 0.0;
  for (double qj : mod.q) {
    auto f = [&](double u) {
      const double x = std::exp(u);
      return std::exp(-qj * x + mod.p * u) * cdf(x);
    };
    total += std::pow(qj, mod.p) *
             log_trapezoid(f, -40.0 / mod.p, std::log(60.0 / qj), 1e-7);
  }
  return 0.5 * mod.phi * total / std::tgamma(mod.p);
}

// --- fixed gain ------------------------------------------------------------------------

MetricEstimate outage_fixed(const SystemConfig& cfg, double gamma_th) {
  require_fixed(cfg);
  require_positive(gamma_th, "gamma_th");
  const Estimate e = SinrCdf(cfg, CdfKind::FixedGainExact).cdf(gamma_th);
  return analytic(e.value, e.error);
}

MetricEstimate outage_fixed_asymptotic(const SystemConfig& cfg, double gamma_th) {
  require_fixed(cfg);
  require_positive(gamma_th, "gamma_th");
  const FixedParts fp(cfg);
  const double z = fp.Br * gamma_th / cfg.fso.mu_r;
  double value = 0.0, error = 0.0;
  for (int k : fp.ks) {
    const double ls = fp.log_prefactor(k);
    for (const auto& [y, coef] : fp.exponents(k)) {
      if (coef == 0.0) continue;
      const auto g = fp.xi_meijer(y, ls);
      value += coef * std::pow(z, y) * g.value;
      error += std::abs(coef * std::pow(z, y)) * g.error;
    }
    const auto h = fp.remainder(k, fp.z2() * z, ls + std::log(z), std::nullopt);
    value += h.value;
    error += h.error;
  }
  // The expansion, like the exact bivariate form, is the complement F - 1.
  value = std::clamp(1.0 + value, 0.0, 1.0);
  return analytic(value, error, Method::Asymptotic);
}

double diversity_gain(const SystemConfig& cfg, DiversityReading reading) {
  cfg.validate();
  const auto ks = blocks::active_terms(link_constants(cfg.fso));
  const double k = reading == DiversityReading::Beta ? cfg.fso.beta : ks.front();
  const double r = cfg.fso.r;
  return std::min({cfg.rf_desired.delta * cfg.rf_desired.m, cfg.rf_desired.kappa,
                   cfg.fso.xi * cfg.fso.xi / r, cfg.fso.alpha / r, k / r});
}

MetricEstimate ber_fixed(const SystemConfig& cfg, const ModulationScheme& mod) {
  require_fixed(cfg);
  mod.validate();
  const FixedParts fp(cfg);
  const double r = cfg.fso.r, x2 = cfg.fso.xi * cfg.fso.xi;
  double value = 0.0, error = 0.0;
  for (int k : fp.ks) {
    BivariateBlock first;
    first.m = 1;
    first.n = 3;
    first.upper = {{1.0 - x2, r}, {1.0 - cfg.fso.alpha, r}, {1.0 - k, r}};
    first.lower = {{mod.p, 1.0}, {0.0, 1.0}, {-x2, r}};
    const auto spec =
        fp.bivariate(first, fp.log_prefactor(k) + std::log(0.5 * mod.phi) - std::lgamma(mod.p));
    for (double qj : mod.q) {
      const auto e = specfun::fox_h_bivariate(spec, cfg.fso.mu_r * qj / fp.Br, fp.z2());
      value += e.value;
      error += e.error;
    }
  }
  // Complement, as for the CDF: P_e = phi n / 2 + sum.
  value = std::clamp(mod.zero_snr_ber() + value, 0.0, mod.zero_snr_ber());
  return analytic(value, error);
}

MetricEstimate ber_fixed_asymptotic(const SystemConfig& cfg, const ModulationScheme& mod) {
  require_fixed(cfg);
  mod.validate();
  const FixedParts fp(cfg);
  const double pre = std::log(0.5 * mod.phi) - std::lgamma(mod.p);
  double value = 0.0, error = 0.0;
  for (double qj : mod.q) {
    const double z = fp.Br / (cfg.fso.mu_r * qj);
    for (int k : fp.ks) {
      const double ls = fp.log_prefactor(k) + pre;
      for (const auto& [y, coef] : fp.exponents(k)) {
        if (coef == 0.0) continue;
        const auto g = fp.xi_meijer(y, ls);
        const double c = coef * std::tgamma(mod.p + y) * std::pow(z, y);
        value += c * g.value;
        error += std::abs(c) * g.error;
      }
      const auto h = fp.remainder(k, fp.z2() * z, ls + std::log(z), -mod.p);
      value += h.value;
      error += h.error;
    }
  }
  value = std::clamp(mod.zero_snr_ber() + value, 0.0, mod.zero_snr_ber());
  return analytic(value, error, Method::Asymptotic);
}

MetricEstimate capacity_fixed(const SystemConfig& cfg) {
  require_fixed(cfg);
  const FixedParts fp(cfg);
  const double r = cfg.fso.r, x2 = cfg.fso.xi * cfg.fso.xi;
  double value = 0.0, error = 0.0;
  for (int k : fp.ks) {
    BivariateBlock first;
    first.m = 1;
    first.n = 4;
    first.upper = {{1.0 - x2, r}, {1.0 - cfg.fso.alpha, r}, {1.0 - k, r}, {1.0, 1.0}};
    first.lower = {{1.0, 1.0}, {0.0, 1.0}, {-x2, r}};
    const auto spec = fp.bivariate(first, fp.log_prefactor(k) - std::log(2.0 * kLn2));
    const auto e = specfun::fox_h_bivariate(spec, cfg.fso.mu_r / fp.Br, fp.z2());
    value -= e.value;
    error += e.error;
  }
  return analytic(std::max(0.0, value), error);
}

MetricEstimate capacity_fixed_gg_nakagami(const SystemConfig& cfg) {
  require_fixed(cfg);
  if (cfg.fso.r != 1.0) throw DomainError("the Nakagami special case is for heterodyne detection");
  if (cfg.fso.g != 0.0) throw DomainError("the Gamma-Gamma special case needs g = 0");
  const MalagaLink& link = cfg.fso;
  const MalagaDerived d = gamma_gamma_limit(link);
  const double x2 = link.xi * link.xi, beta = link.beta;
  const double Nm = cfg.rf_desired.delta * cfg.rf_desired.m;
  const double Lmi = cfg.rf_interf.delta * cfg.rf_interf.m;
  const double z2 = cfg.rf_desired.m * cfg.gain() / (cfg.rf_interf.m * cfg.mean_sir);
  BivariateFoxHSpec s;
  s.n1 = 1;
  s.joint_upper = {{0.0, 1.0, 1.0}};
  s.first.m = 1;
  s.first.n = 4;
  s.first.upper = {{1.0 - x2, 1.0}, {1.0 - link.alpha, 1.0}, {1.0 - beta, 1.0}, {1.0, 1.0}};
  s.first.lower = {{1.0, 1.0}, {0.0, 1.0}, {-x2, 1.0}};
  s.second.m = 3;
  s.second.n = 2;
  s.second.upper = {{-1.0, 1.0}, {-Lmi, 1.0}, {0.0, 1.0}};
  s.second.lower = {{-1.0, 1.0}, {-1.0, 1.0}, {Nm - 1.0, 1.0}, {0.0, 1.0}};
  s.log_scale = std::log(x2 * z2 / (2.0 * kLn2)) - std::lgamma(link.alpha) - std::lgamma(beta) -
                std::lgamma(Nm) - std::lgamma(Lmi);
  const auto e = specfun::fox_h_bivariate(s, link.mu_r / d.B, z2);
  return analytic(std::max(0.0, -e.value), e.error);
}

// --- CSI assisted ----------------------------------------------------------------------

namespace {

// Optical block of the min-bound outage: r G^{4,0}_{2,4} in (B^r x / mu_r).
BivariateBlock csi_fso(const MalagaLink& link, int k) {
  const double r = link.r, x2 = link.xi * link.xi;
  BivariateBlock b;
  b.m = 4;
  b.n = 0;
  b.upper = {{x2 + 1.0, r}, {1.0, r}};
  b.lower = {{0.0, r}, {x2, r}, {link.alpha, r}, {double(k), r}};
  return b;
}

BivariateBlock csi_rf(const RfParams& rf) {
  BivariateBlock b;
  b.m = 3;
  b.n = 2;
  b.upper = {{1.0 - rf.kappa_i, 1.0}, {1.0 - rf.Lm_i, 1.0}, {1.0, 1.0}};
  b.lower = {{0.0, 1.0}, {rf.kappa, 1.0}, {rf.Nm, 1.0}};
  return b;
}

// Complementary-MGF block of the optical hop.
BivariateBlock cmgf_fso_block(const MalagaLink& link, int k) {
  const double r = link.r, x2 = link.xi * link.xi;
  BivariateBlock b;
  b.m = 1;
  b.n = 4;
  b.upper = {{1.0 - r, r}, {1.0 - x2 - r, r}, {1.0 - link.alpha - r, r}, {1.0 - k - r, r}};
  b.lower = {{0.0, 1.0}, {-x2 - r, r}, {-r, r}};
  return b;
}

struct CsiParts {
  MalagaLink link;
  MalagaDerived d;
  RfParams rf;
  double Br;
  std::vector<int> ks;

  explicit CsiParts(const SystemConfig& cfg)
      : link(cfg.fso), d(link_constants(cfg.fso)), rf(rf_params(cfg)),
        Br(std::pow(d.B, cfg.fso.r)), ks(blocks::active_terms(d)) {}

  double log_coefficient(int k) const {
    return std::log(link.xi * link.xi * d.weight[k - 1] * link.r) - std::lgamma(link.alpha) -
           std::lgamma(k) - rf.log_norm();
  }
};

double capacity_cmgf_integral(const FsoLaw& fso, const std::function<double(double)>& m2) {
  auto f = [&](double u) {
    const double s = std::exp(u);
    return s * s * std::exp(-s) * fso.cmgf(s).value * m2(s);
  };
  return log_trapezoid(f, -30.0, std::log(60.0), 1e-9) / (2.0 * kLn2);
}

}  // namespace

MetricEstimate outage_csi(const SystemConfig& cfg, double gamma_th) {
  require_csi(cfg);
  require_positive(gamma_th, "gamma_th");
  const CsiParts cp(cfg);
  double value = 0.0, error = 0.0;
  for (int k : cp.ks) {
    BivariateFoxHSpec s;
    s.first = csi_fso(cp.link, k);
    s.second = csi_rf(cp.rf);
    s.log_scale = cp.log_coefficient(k);
    const auto e =
        specfun::fox_h_bivariate(s, cp.Br * gamma_th / cp.link.mu_r, gamma_th / cp.rf.scale());
    value += e.value;
    error += e.error;
  }
  return analytic(std::clamp(1.0 - value, 0.0, 1.0), error);
}

MetricEstimate ber_csi(const SystemConfig& cfg, const ModulationScheme& mod) {
  require_csi(cfg);
  mod.validate();
  const CsiParts cp(cfg);
  double value = 0.0, error = 0.0;
  for (int k : cp.ks) {
    BivariateFoxHSpec s;
    s.n1 = 1;
    s.joint_upper = {{1.0 - mod.p, 1.0, 1.0}};
    s.first = csi_fso(cp.link, k);
    s.second = csi_rf(cp.rf);
    s.log_scale = cp.log_coefficient(k) + std::log(0.5 * mod.phi) - std::lgamma(mod.p);
    for (double qj : mod.q) {
      const auto e = specfun::fox_h_bivariate(s, cp.Br / (cp.link.mu_r * qj),
                                              1.0 / (cp.rf.scale() * qj));
      value += e.value;
      error += e.error;
    }
  }
  return analytic(std::clamp(mod.zero_snr_ber() - value, 0.0, mod.zero_snr_ber()), error);
}

MetricEstimate capacity_csi(const SystemConfig& cfg) {
  require_csi(cfg);
  const CsiParts cp(cfg);
  double value = 0.0, error = 0.0;
  for (int k : cp.ks) {
    BivariateFoxHSpec s;
    s.n1 = 1;
    s.joint_upper = {{0.0, 1.0, 1.0}};
    s.first = cmgf_fso_block(cp.link, k);
    s.second.m = 3;
    s.second.n = 3;
    s.second.upper = {{1.0, 1.0}, {1.0 - cp.rf.kappa, 1.0}, {1.0 - cp.rf.Nm, 1.0}};
    s.second.lower = {{1.0, 1.0}, {cp.rf.kappa_i, 1.0}, {cp.rf.Lm_i, 1.0}, {0.0, 1.0}};
    s.log_scale = cp.log_coefficient(k) + std::log(cp.link.mu_r / cp.Br) - std::log(2.0 * kLn2);
    const auto e = specfun::fox_h_bivariate(s, cp.link.mu_r / cp.Br, cp.rf.scale());
    value += e.value;
    error += e.error;
  }
  return analytic(std::max(0.0, value), error);
}

MetricEstimate capacity_csi_nakagami(const SystemConfig& cfg) {
  require_csi(cfg);
  if (cfg.fso.r != 1.0) throw DomainError("the Nakagami special case is for heterodyne detection");
  const CsiParts cp(cfg);
  const double Nm = cfg.rf_desired.delta * cfg.rf_desired.m;
  const double Lmi = cfg.rf_interf.delta * cfg.rf_interf.m;
  const double z2 = cfg.rf_interf.m * cfg.mean_sir / cfg.rf_desired.m;
  double value = 0.0, error = 0.0;
  for (int k : cp.ks) {
    BivariateFoxHSpec s;
    s.n1 = 1;
    s.joint_upper = {{0.0, 1.0, 1.0}};
    s.first = cmgf_fso_block(cp.link, k);
    s.second.m = 2;
    s.second.n = 2;
    s.second.upper = {{1.0, 1.0}, {1.0 - Nm, 1.0}};
    s.second.lower = {{1.0, 1.0}, {Lmi, 1.0}, {0.0, 1.0}};
    s.log_scale = std::log(cp.link.xi * cp.link.xi * cp.d.weight[k - 1] * cp.link.mu_r / cp.Br) -
                  std::lgamma(cp.link.alpha) - std::lgamma(k) - std::lgamma(Nm) -
                  std::lgamma(Lmi) - std::log(2.0 * kLn2);
    const auto e = specfun::fox_h_bivariate(s, cp.link.mu_r / cp.Br, z2);
    value += e.value;
    error += e.error;
  }
  return analytic(std::max(0.0, value), error);
}

MetricEstimate capacity_csi_cmgf_quadrature(const SystemConfig& cfg) {
  cfg.validate();
  const FsoLaw fso(cfg.fso);
  const SirLaw sir(rf_params(cfg));
  const double value =
      capacity_cmgf_integral(fso, [&](double s) { return sir.cmgf(s).value; });
  return analytic(value, 0.0);
}

}  // namespace fsorf
