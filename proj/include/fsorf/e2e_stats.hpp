#pragma once

// End-to-end SINR statistics of the dual-hop link and the per-hop laws they
// are built from.

#include <vector>

#include "fsorf/channels.hpp"
#include "fsorf/specfun.hpp"

namespace fsorf {

/// A statistic together with its numerical error bound.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool finite_difference = false;  // pdf obtained by differencing the CDF
};

/// Shape/scale summary of the RF SIR gamma_RD / gamma_ID.
struct RfParams {
  double m = 2.5, kappa = 1.09, Nm = 5.0;
  double m_i = 1.5, kappa_i = 3.5, Lm_i = 3.0;
  double mean_sir = 100.0;

  /// kappa_I m_I mean_sir / (kappa m): scale of the SIR.
  double scale() const { return kappa_i * m_i * mean_sir / (kappa * m); }
  /// log of G(Nm) G(kappa) G(Lm_I) G(kappa_I).
  double log_norm() const;
};

RfParams rf_params(const GKLink& desired, const GKLink& interferer, double mean_sir);
RfParams rf_params(const SystemConfig& cfg);

/// Optical hop: CDF, complementary CDF and complementary MGF of gamma_1.
class FsoLaw {
 public:
  explicit FsoLaw(const MalagaLink& link);
  Estimate cdf(double x) const;
  /// Complementary CDF through the Meijer-G form in B (x/mu_r)^{1/r}.
  Estimate ccdf(double x) const;
  Estimate cmgf(double s) const;
  const MalagaLink& link() const { return link_; }
  const MalagaDerived& constants() const { return d_; }

 private:
  MalagaLink link_;
  MalagaDerived d_;
};

/// RF hop: the SIR gamma_2.
class SirLaw {
 public:
  explicit SirLaw(const RfParams& rf);
  Estimate cdf(double x) const;
  Estimate ccdf(double x) const;
  Estimate pdf(double x) const;
  Estimate cmgf(double s) const;
  const RfParams& params() const { return rf_; }

 private:
  RfParams rf_;
  specfun::FoxHSpec cdf_spec_, pdf_spec_, cmgf_spec_;
};

enum class CdfKind { FixedGainExact, CsiMinBound };

/// Prepared end-to-end CDF for one system configuration. Immutable after
/// construction, so concurrent evaluation is safe.
class SinrCdf {
 public:
  SinrCdf(const SystemConfig& cfg, CdfKind kind);
  Estimate cdf(double x) const;
  /// Closed-form density for fixed gain; falls back to central differences of
  /// the CDF if the bivariate quadrature fails. Min-bound densities are always
  /// differenced.
  Estimate pdf(double x) const;
  CdfKind kind() const { return kind_; }
  const SystemConfig& config() const { return cfg_; }
  const FsoLaw& fso() const { return fso_; }
  const SirLaw& sir() const { return sir_; }

 private:
  Estimate fixed_cdf(double x) const;
  Estimate fixed_pdf(double x) const;
  Estimate differenced_pdf(double x) const;

  SystemConfig cfg_;
  CdfKind kind_;
  FsoLaw fso_;
  SirLaw sir_;
  std::vector<int> terms_;                     // active mixture indices k
  std::vector<specfun::BivariateFoxHSpec> cdf_specs_, pdf_specs_;
};

// Bivariate parameter blocks shared with the metrics.
namespace blocks {
/// Optical block of the fixed-gain CDF; `density` selects the differentiated form.
specfun::BivariateBlock fixed_fso(const MalagaLink& link, int k, bool density);
/// RF block of the fixed-gain statistics.
specfun::BivariateBlock fixed_rf(const RfParams& rf);
/// log of xi^2 A b_k (C / S) / (G(alpha) G(k) G(Nm) G(kappa) G(Lm_I) G(kappa_I)).
double fixed_log_prefactor(const MalagaLink& link, const MalagaDerived& d, const RfParams& rf,
                           double C, int k);
/// Mixture indices with nonzero weight.
std::vector<int> active_terms(const MalagaDerived& d);
}  // namespace blocks

// --- free-function forms -------------------------------------------------------

double fso_cdf(const MalagaLink& link, double x);
/// Generalized-K SNR with shapes (delta m, kappa) and per-branch average mean_snr.
double gk_pdf(const GKLink& link, double x);
double gk_cdf(const GKLink& link, double x);
double sir_cdf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double x);
double rf_sir_pdf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double x);
double fixed_gain_cdf(const SystemConfig& cfg, double x);
double fixed_gain_pdf(const SystemConfig& cfg, double x);
double csi_min_cdf(const SystemConfig& cfg, double x);
double cmgf_fso(const MalagaLink& link, double s);
double cmgf_rf(const GKLink& rf_desired, const GKLink& rf_interf, double mean_sir, double s);

}  // namespace fsorf
