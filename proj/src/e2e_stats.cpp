#include "fsorf/e2e_stats.hpp"

#include <algorithm>
#include <cmath>

#include "fsorf/errors.hpp"

namespace fsorf {

using specfun::BivariateBlock;
using specfun::BivariateFoxHSpec;
using specfun::FoxHSpec;

namespace {

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

double log_weight(const MalagaDerived& d, int k) { return std::log(d.weight[k - 1]); }

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

double RfParams::log_norm() const {
  return std::lgamma(Nm) + std::lgamma(kappa) + std::lgamma(Lm_i) + std::lgamma(kappa_i);
}

RfParams rf_params(const GKLink& desired, const GKLink& interferer, double mean_sir) {
  desired.validate();
  interferer.validate();
  require_positive(mean_sir, "mean SIR");
  RfParams rf;
  rf.m = desired.m;
  rf.kappa = desired.kappa;
  rf.Nm = desired.delta * desired.m;
  rf.m_i = interferer.m;
  rf.kappa_i = interferer.kappa;
  rf.Lm_i = interferer.delta * interferer.m;
  rf.mean_sir = mean_sir;
  return rf;
}

RfParams rf_params(const SystemConfig& cfg) {
  return rf_params(cfg.rf_desired, cfg.rf_interf, cfg.mean_sir);
}

namespace blocks {

std::vector<int> active_terms(const MalagaDerived& d) {
  std::vector<int> k;
  for (std::size_t i = 0; i < d.weight.size(); ++i)
    if (d.weight[i] > 0.0) k.push_back(static_cast<int>(i) + 1);
  return k;
}

BivariateBlock fixed_fso(const MalagaLink& link, int k, bool density) {
  const double r = link.r, x2 = link.xi * link.xi;
  BivariateBlock b;
  b.m = 0;
  b.n = 3;
  b.upper = {{1.0 - x2, r}, {1.0 - link.alpha, r}, {1.0 - k, r}};
  b.lower = {{density ? 1.0 : 0.0, 1.0}, {-x2, r}};
  return b;
}

BivariateBlock fixed_rf(const RfParams& rf) {
  BivariateBlock b;
  b.m = 4;
  b.n = 3;
  b.upper = {{-1.0, 1.0}, {-rf.kappa_i, 1.0}, {-rf.Lm_i, 1.0}, {0.0, 1.0}};
  b.lower = {{-1.0, 1.0}, {-1.0, 1.0}, {rf.kappa - 1.0, 1.0}, {rf.Nm - 1.0, 1.0}, {0.0, 1.0}};
  return b;
}

double fixed_log_prefactor(const MalagaLink& link, const MalagaDerived& d, const RfParams& rf,
                           double C, int k) {
  return 2.0 * std::log(link.xi) + log_weight(d, k) + std::log(C / rf.scale()) -
         std::lgamma(link.alpha) - std::lgamma(k) - rf.log_norm();
}

}  // namespace blocks

// --- optical hop -----------------------------------------------------------------

FsoLaw::FsoLaw(const MalagaLink& link) : link_(link), d_(link_constants(link)) {}

Estimate FsoLaw::cdf(double x) const {
  require_positive(x, "x");
  const double r = link_.r, x2 = link_.xi * link_.xi;
  const double z = std::pow(d_.B, r) * x / link_.mu_r;
  Estimate out;
  for (int k : blocks::active_terms(d_)) {
    const double ls = std::log(x2 * r) + log_weight(d_, k) - std::lgamma(link_.alpha) -
                      std::lgamma(k);
    const auto e = specfun::fox_h(
        fox_spec(3, 1, {{1.0, r}, {x2 + 1.0, r}}, {{x2, r}, {link_.alpha, r}, {double(k), r}, {0.0, r}},
                 ls),
        z);
    out.value += e.value;
    out.error += e.error;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

Estimate FsoLaw::ccdf(double x) const {
  require_positive(x, "x");
  const double x2 = link_.xi * link_.xi;
  const double z = d_.B * std::pow(x / link_.mu_r, 1.0 / link_.r);
  Estimate out;
  for (int k : blocks::active_terms(d_)) {
    auto spec = specfun::meijer_spec(4, 0, {x2 + 1.0, 1.0}, {0.0, x2, link_.alpha, double(k)});
    spec.log_scale = std::log(x2) + log_weight(d_, k) - std::lgamma(link_.alpha) - std::lgamma(k);
    const auto e = specfun::meijer_g(spec, z);
    out.value += e.value;
    out.error += e.error;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

Estimate FsoLaw::cmgf(double s) const {
  require_positive(s, "s");
  const double r = link_.r, x2 = link_.xi * link_.xi;
  const double Br = std::pow(d_.B, r);
  const double z = link_.mu_r * s / Br;
  Estimate out;
  for (int k : blocks::active_terms(d_)) {
    const double ls = std::log(x2 * r * link_.mu_r / Br) + log_weight(d_, k) -
                      std::lgamma(link_.alpha) - std::lgamma(k);
    const auto e = specfun::fox_h(
        fox_spec(1, 4,
                 {{1.0 - r, r}, {1.0 - x2 - r, r}, {1.0 - link_.alpha - r, r}, {1.0 - k - r, r}},
                 {{0.0, 1.0}, {-x2 - r, r}, {-r, r}}, ls),
        z);
    out.value += e.value;
    out.error += e.error;
  }
  return out;
}

// --- RF hop ----------------------------------------------------------------------

SirLaw::SirLaw(const RfParams& rf) : rf_(rf) {
  const double ln = rf.log_norm();
  cdf_spec_ = specfun::meijer_spec(3, 2, {1.0 - rf.kappa_i, 1.0 - rf.Lm_i, 1.0},
                                   {0.0, rf.kappa, rf.Nm});
  cdf_spec_.log_scale = -ln;
  pdf_spec_ = specfun::meijer_spec(3, 3, {-1.0, -rf.kappa_i, -rf.Lm_i, 0.0},
                                   {-1.0, rf.kappa - 1.0, rf.Nm - 1.0, 0.0});
  pdf_spec_.log_scale = -ln - std::log(rf.scale());
  cmgf_spec_ = fox_spec(3, 3, {{1.0, 1.0}, {1.0 - rf.kappa, 1.0}, {1.0 - rf.Nm, 1.0}},
                        {{1.0, 1.0}, {rf.kappa_i, 1.0}, {rf.Lm_i, 1.0}, {0.0, 1.0}}, -ln);
}

Estimate SirLaw::ccdf(double x) const {
  require_positive(x, "x");
  const auto e = specfun::meijer_g(cdf_spec_, x / rf_.scale());
  return {std::clamp(e.value, 0.0, 1.0), e.error};
}

Estimate SirLaw::cdf(double x) const {
  const Estimate c = ccdf(x);
  return {1.0 - c.value, c.error};
}

Estimate SirLaw::pdf(double x) const {
  require_positive(x, "x");
  const auto e = specfun::meijer_g(pdf_spec_, x / rf_.scale());
  return {std::max(0.0, -e.value), e.error};
}

Estimate SirLaw::cmgf(double s) const {
  require_positive(s, "s");
  const auto e = specfun::fox_h(cmgf_spec_, rf_.scale() * s);
  return {e.value / s, e.error / s};
}

// --- end-to-end ------------------------------------------------------------------

SinrCdf::SinrCdf(const SystemConfig& cfg, CdfKind kind)
    : cfg_(cfg), kind_(kind), fso_(cfg.fso), sir_(rf_params(cfg)) {
  cfg_.validate();
  if (kind == CdfKind::FixedGainExact && !cfg_.fixed_gain())
    throw DomainError("fixed-gain statistics need a fixed-gain relay");
  if (kind == CdfKind::CsiMinBound && cfg_.fixed_gain())
    throw DomainError("min-bound statistics need a CSI-assisted relay");
  terms_ = blocks::active_terms(fso_.constants());
  if (kind != CdfKind::FixedGainExact) return;
  const RfParams& rf = sir_.params();
  for (int k : terms_) {
    BivariateFoxHSpec spec;
    spec.n1 = 1;
    spec.joint_upper = {{0.0, 1.0, 1.0}};
    spec.second = blocks::fixed_rf(rf);
    spec.log_scale = blocks::fixed_log_prefactor(cfg_.fso, fso_.constants(), rf, cfg_.gain(), k);
    spec.first = blocks::fixed_fso(cfg_.fso, k, false);
    cdf_specs_.push_back(spec);
    spec.first = blocks::fixed_fso(cfg_.fso, k, true);
    pdf_specs_.push_back(spec);
  }
}

Estimate SinrCdf::fixed_cdf(double x) const {
  const double z1 = cfg_.fso.mu_r / (std::pow(fso_.constants().B, cfg_.fso.r) * x);
  const double z2 = cfg_.gain() / sir_.params().scale();
  // The closed form is the complement F - 1; see the README.
  Estimate out{1.0, 0.0};
  for (const auto& spec : cdf_specs_) {
    const auto e = specfun::fox_h_bivariate(spec, z1, z2);
    out.value += e.value;
    out.error += e.error;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

Estimate SinrCdf::fixed_pdf(double x) const {
  const double z1 = cfg_.fso.mu_r / (std::pow(fso_.constants().B, cfg_.fso.r) * x);
  const double z2 = cfg_.gain() / sir_.params().scale();
  Estimate out;
  for (const auto& spec : pdf_specs_) {
    const auto e = specfun::fox_h_bivariate(spec, z1, z2);
    out.value -= e.value / x;
    out.error += e.error / x;
  }
  out.value = std::max(0.0, out.value);
  return out;
}

Estimate SinrCdf::differenced_pdf(double x) const {
  // Richardson-extrapolated central differences.
  auto central = [&](double h) {
    const Estimate a = cdf(x + h), b = cdf(x - h);
    return std::pair{(a.value - b.value) / (2.0 * h), (a.error + b.error) / (2.0 * h)};
  };
  const double h = 0.02 * x;
  const auto [d1, e1] = central(h);
  const auto [d2, e2] = central(0.5 * h);
  const double rich = (4.0 * d2 - d1) / 3.0;
  return {std::max(0.0, rich), std::abs(rich - d2) + e1 + e2, true};
}

Estimate SinrCdf::cdf(double x) const {
  require_positive(x, "x");
  if (kind_ == CdfKind::FixedGainExact) return fixed_cdf(x);
  const Estimate a = fso_.ccdf(x), b = sir_.ccdf(x);
  return {std::clamp(1.0 - a.value * b.value, 0.0, 1.0), a.error + b.error};
}

Estimate SinrCdf::pdf(double x) const {
  require_positive(x, "x");
  if (kind_ == CdfKind::FixedGainExact) {
    try {
      return fixed_pdf(x);
    } catch (const ConvergenceError&) {
    }
  }
  return differenced_pdf(x);
}

// --- free functions --------------------------------------------------------------

double fso_cdf(const MalagaLink& link, double x) { return FsoLaw(link).cdf(x).value; }

double gk_pdf(const GKLink& link, double x) {
  link.validate();
  require_positive(x, "x");
  const double a = link.delta * link.m, k = link.kappa, b = 1.0 / link.scale();
  const double log_f = std::log(2.0) + 0.5 * (a + k) * std::log(b) +
                       (0.5 * (a + k) - 1.0) * std::log(x) - std::lgamma(a) - std::lgamma(k);
  return std::exp(log_f) * specfun::bessel_k(k - a, 2.0 * std::sqrt(b * x));
}

double gk_cdf(const GKLink& link, double x) {
  link.validate();
  require_positive(x, "x");
  const double a = link.delta * link.m, k = link.kappa;
  auto spec = specfun::meijer_spec(2, 1, {1.0}, {a, k, 0.0});
  spec.log_scale = -std::lgamma(a) - std::lgamma(k);
  return std::clamp(specfun::meijer_g(spec, x / link.scale()).value, 0.0, 1.0);
}

double sir_cdf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double x) {
  return SirLaw(rf_params(rf_desired, rf_interf, mean_sir)).cdf(x).value;
}

double rf_sir_pdf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double x) {
  return SirLaw(rf_params(rf_desired, rf_interf, mean_sir)).pdf(x).value;
}

double fixed_gain_cdf(const SystemConfig& cfg, double x) {
  return SinrCdf(cfg, CdfKind::FixedGainExact).cdf(x).value;
}

double fixed_gain_pdf(const SystemConfig& cfg, double x) {
  return SinrCdf(cfg, CdfKind::FixedGainExact).pdf(x).value;
}

double csi_min_cdf(const SystemConfig& cfg, double x) {
  return SinrCdf(cfg, CdfKind::CsiMinBound).cdf(x).value;
}

double cmgf_fso(const MalagaLink& link, double s) { return FsoLaw(link).cmgf(s).value; }

double cmgf_rf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double s) {
  return SirLaw(rf_params(rf_desired, rf_interf, mean_sir)).cmgf(s).value;
}

}  // namespace fsorf
