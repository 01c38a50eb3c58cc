#include "fsorf/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fsorf/errors.hpp"

namespace fsorf {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void MalagaLink::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("Malaga: alpha must be > 0");
  if (beta < 1) throw DomainError("Malaga: beta must be a positive integer");
  if (!(g >= 0) || !std::isfinite(g)) throw DomainError("Malaga: g must be >= 0");
  if (!(omega >= 0) || !std::isfinite(omega)) throw DomainError("Malaga: Omega must be >= 0");
  if (g == 0 && omega == 0) throw DomainError("Malaga: g and Omega cannot both vanish");
  if (!(xi > 0) || !std::isfinite(xi)) throw DomainError("Malaga: xi must be > 0");
  if (r != 1 && r != 2) throw DomainError("Malaga: detection mode r must be 1 or 2");
  if (!(mu_r > 0) || !std::isfinite(mu_r)) throw DomainError("Malaga: mu_r must be > 0");
  if (b0 && rho) {
    if (!(*rho >= 0 && *rho <= 1)) throw DomainError("Malaga: rho must lie in [0, 1]");
    const double expect = 2.0 * *b0 * (1.0 - *rho);
    if (std::abs(expect - g) > 1e-12 * std::max(1.0, g))
      throw DomainError("Malaga: g inconsistent with 2 b0 (1 - rho)");
  }
}

MalagaLink malaga_from_scattering(double alpha, int beta, double b0, double rho, double omega,
                                  double xi, int r, double mu_r) {
  if (!(b0 > 0)) throw DomainError("Malaga: b0 must be > 0");
  if (!(rho >= 0 && rho <= 1)) throw DomainError("Malaga: rho must lie in [0, 1]");
  MalagaLink link{alpha, beta, 2.0 * b0 * (1.0 - rho), omega, xi, r, mu_r, b0, rho};
  link.validate();
  return link;
}

MalagaDerived derive_constants(const MalagaLink& link) {
  link.validate();
  if (link.g == 0.0)
    throw DomainError("derive_constants: g = 0 is singular, use gamma_gamma_limit");
  const double a = link.alpha;
  const int beta = link.beta;
  const double g = link.g, om = link.omega;
  const double gbo = g * beta + om;

  MalagaDerived d;
  d.h = link.h();
  d.B = a * beta * d.h * (g + om) / gbo;
  d.theta = gbo / (a * beta);
  const double log_a = 0.5 * a * std::log(a) + (beta + 0.5 * a) * std::log(g * beta / gbo) -
                       (1.0 + 0.5 * a) * std::log(g);
  d.A = std::exp(log_a);
  for (int k = 1; k <= beta; ++k) {
    double log_b = log_binomial(beta - 1, k - 1) + (1.0 - 0.5 * k) * std::log(gbo) +
                   0.5 * (a + k) * std::log(gbo / (a * beta)) + 0.5 * k * std::log(a / beta);
    if (k > 1) log_b += (om > 0 ? (k - 1) * std::log(om / g) : -INFINITY);
    d.b.push_back(std::exp(log_b));
    d.weight.push_back(std::exp(log_a + log_b));
  }
  return d;
}

MalagaDerived gamma_gamma_limit(const MalagaLink& link) {
  MalagaLink probe = link;
  probe.g = 0.0;
  probe.omega = link.omega > 0 ? link.omega : 1.0;
  probe.validate();
  MalagaDerived d;
  d.gamma_gamma = true;
  d.h = link.h();
  d.A = 1.0;
  d.b.assign(link.beta, 0.0);
  d.b.back() = 1.0;
  d.weight = d.b;
  d.B = link.alpha * link.beta * d.h;
  d.theta = probe.omega / (link.alpha * link.beta);
  return d;
}

MalagaDerived link_constants(const MalagaLink& link) {
  return link.g == 0.0 ? gamma_gamma_limit(link) : derive_constants(link);
}

double electrical_snr(const MalagaLink& link, double mu1) {
  if (!(mu1 > 0)) throw DomainError("electrical_snr: mu1 must be > 0");
  if (link.r == 1) return mu1;
  if (link.r != 2) throw DomainError("electrical_snr: detection mode r must be 1 or 2");
  const double x2 = link.xi * link.xi;
  const double a = link.alpha, g = link.g, om = link.omega;
  const double num = mu1 * a * x2 * (x2 + 2.0) / ((x2 + 1.0) * (x2 + 1.0)) * (g + om);
  const double den = (a + 1.0) * (2.0 * g * (g + 2.0 * om) + om * om * (1.0 + 1.0 / link.beta));
  return num / den;
}

void GKLink::validate() const {
  if (!(m >= 0.5) || !std::isfinite(m)) throw DomainError("GK: m must be >= 0.5");
  if (!(kappa > 0) || !std::isfinite(kappa)) throw DomainError("GK: kappa must be > 0");
  if (delta < 1) throw DomainError("GK: delta must be a positive integer");
  if (!(mean_snr > 0) || !std::isfinite(mean_snr)) throw DomainError("GK: mean SNR must be > 0");
}

void SystemConfig::validate() const {
  fso.validate();
  rf_desired.validate();
  rf_interf.validate();
  if (!(mean_sir > 0) || !std::isfinite(mean_sir)) throw DomainError("mean SIR must be > 0");
  const double ratio = rf_desired.mean_snr / rf_interf.mean_snr;
  if (std::abs(ratio - mean_sir) > 1e-9 * mean_sir)
    throw DomainError("mean SIR inconsistent with the RF desired/interferer averages");
  if (const auto* fg = std::get_if<FixedGain>(&relay); fg && !(fg->C > 0))
    throw DomainError("fixed relay gain C must be > 0");
}

double SystemConfig::gain() const {
  if (const auto* fg = std::get_if<FixedGain>(&relay)) return fg->C;
  throw DomainError("relay is CSI-assisted; no fixed gain");
}

double draw_gamma(double shape, Rng& rng) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

MalagaSampler::MalagaSampler(const MalagaLink& link)
    : link_(link), derived_(link_constants(link)) {
  link_.validate();
  double total = 0.0;
  for (double w : derived_.weight) {
    total += w;
    cumulative_.push_back(total);
  }
  if (!(total > 0)) throw DomainError("Malaga sampler: mixture weights vanish");
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
  // The CDF argument B^r x / mu_r corresponds to normalizing the irradiance
  // by its mean h (g + Omega).
  norm_ = derived_.h * (derived_.gamma_gamma ? (link_.omega > 0 ? link_.omega : 1.0)
                                             : link_.g + link_.omega);
}

double MalagaSampler::operator()(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const int k = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                          cumulative_.size() - 1)) + 1;
  const double irradiance = derived_.theta * draw_gamma(link_.alpha, rng) * draw_gamma(k, rng);
  // Pointing loss with Rayleigh jitter: h_p / A0 = U^{1/xi^2}.
  double v = unif(rng);
  while (v == 0.0) v = unif(rng);
  const double pointing = std::pow(v, 1.0 / (link_.xi * link_.xi));
  const double y = irradiance * pointing / norm_;
  return link_.mu_r * (link_.r == 1 ? y : y * y);
}

double sample_malaga_snr(const MalagaLink& link, Rng& rng) { return MalagaSampler(link)(rng); }

double sample_gk_snr(const GKLink& link, Rng& rng) {
  return link.scale() * draw_gamma(link.delta * link.m, rng) * draw_gamma(link.kappa, rng);
}

double sample_sir(const SystemConfig& cfg, Rng& rng) {
  GKLink des = cfg.rf_desired;
  GKLink itf = cfg.rf_interf;
  des.mean_snr = cfg.mean_sir;
  itf.mean_snr = 1.0;
  return sample_gk_snr(des, rng) / sample_gk_snr(itf, rng);
}

}  // namespace fsorf
