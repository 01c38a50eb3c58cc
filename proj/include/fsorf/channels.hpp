#pragma once

// Channel laws of the two hops: Malaga-M turbulence with pointing errors on the
// optical hop, generalized-K fading/shadowing on the RF hop and interferers.

#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace fsorf {

using Rng = std::mt19937_64;

enum class Detection : int { Heterodyne = 1, IMDD = 2 };

struct MalagaLink {
  double alpha = 2.4;  // large-scale turbulence
  int beta = 2;        // small-scale turbulence, integer mixture size
  double g = 0.5;      // scattered power 2 b0 (1 - rho)
  double omega = 1.0;  // LOS average power
  double xi = 6.8;     // beam-width to jitter ratio
  int r = 1;           // 1 heterodyne, 2 IM/DD
  double mu_r = 100.0; // electrical SNR, linear
  std::optional<double> b0;
  std::optional<double> rho;

  void validate() const;
  double h() const { return xi * xi / (xi * xi + 1.0); }
};

/// Builds a link whose scattered power follows g = 2 b0 (1 - rho).
MalagaLink malaga_from_scattering(double alpha, int beta, double b0, double rho, double omega,
                                  double xi, int r, double mu_r);

struct MalagaDerived {
  double A = 0.0;
  std::vector<double> b;       // b_k, k = 1..beta
  double B = 0.0;
  double h = 0.0;
  std::vector<double> weight;  // A * b_k: mixture weight of the k-th term
  double theta = 0.0;          // (g beta + Omega) / (alpha beta), Gamma-product scale
  bool gamma_gamma = false;
};

MalagaDerived derive_constants(const MalagaLink& link);

/// Single-term (k = beta) representation used when g = 0 and Omega = 1.
MalagaDerived gamma_gamma_limit(const MalagaLink& link);

/// derive_constants for g > 0, gamma_gamma_limit for g = 0.
MalagaDerived link_constants(const MalagaLink& link);

/// Electrical SNR of the detection mode given the heterodyne SNR mu1.
double electrical_snr(const MalagaLink& link, double mu1);

struct GKLink {
  double m = 2.5;
  double kappa = 1.09;
  int delta = 1;
  double mean_snr = 1.0;  // per-branch average, linear

  void validate() const;
  double scale() const { return mean_snr / (kappa * m); }
};

struct FixedGain {
  double C = 1.7;
};
struct CsiAssisted {};
using Relay = std::variant<FixedGain, CsiAssisted>;

struct SystemConfig {
  MalagaLink fso;
  GKLink rf_desired;  // delta = N
  GKLink rf_interf;   // delta = L
  Relay relay = FixedGain{};
  double mean_sir = 100.0;  // gamma_RD / gamma_ID averages, linear

  void validate() const;
  bool fixed_gain() const { return std::holds_alternative<FixedGain>(relay); }
  double gain() const;
};

/// Draws Malaga-M SNRs. Holds only immutable precomputed data; the random
/// stream is supplied by the caller.
class MalagaSampler {
 public:
  explicit MalagaSampler(const MalagaLink& link);
  double operator()(Rng& rng) const;
  const MalagaDerived& constants() const { return derived_; }

 private:
  MalagaLink link_;
  MalagaDerived derived_;
  std::vector<double> cumulative_;  // normalized mixture CDF over k
  double norm_;                     // divides the irradiance so its mean is one
};

double sample_malaga_snr(const MalagaLink& link, Rng& rng);
double sample_gk_snr(const GKLink& link, Rng& rng);

/// SIR gamma_RD / gamma_ID for one realization.
double sample_sir(const SystemConfig& cfg, Rng& rng);

/// Draw from Gamma(shape, 1).
double draw_gamma(double shape, Rng& rng);

}  // namespace fsorf
