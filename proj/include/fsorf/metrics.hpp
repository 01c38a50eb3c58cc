#pragma once

// Outage probability, average BER and ergodic capacity of the dual-hop link:
// exact closed forms, high-SNR expansions and special-case reductions.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsorf/channels.hpp"
#include "fsorf/e2e_stats.hpp"

namespace fsorf {

/// Conditional error probability (phi/2) sum_j Q(p, q_j gamma), Q the
/// regularized upper incomplete gamma function.
struct ModulationScheme {
  std::string name = "bpsk";
  double phi = 1.0;
  int n = 1;
  double p = 0.5;
  std::vector<double> q{1.0};

  void validate() const;
  double zero_snr_ber() const { return 0.5 * phi * n; }
  double conditional_ber(double gamma) const;
};

/// Built-in rows: bpsk, qpsk, cbfsk, dbpsk, ncbfsk.
const std::vector<ModulationScheme>& modulation_table();
/// Looks a row up by (case-insensitive) name; throws ConfigError if unknown.
ModulationScheme modulation(const std::string& name);

enum class Method { Analytic, Asymptotic, MonteCarlo };
const char* method_name(Method m);

struct MetricEstimate {
  double value = 0.0;
  Method method = Method::Analytic;
  std::optional<double> std_err;
  std::optional<double> eval_error;
};

/// Which mixture index enters the optical terms of the diversity order.
enum class DiversityReading {
  Beta,              // k = beta
  SmallestActiveK,   // smallest k with nonzero mixture weight
};

// --- fixed-gain relaying -----------------------------------------------------------

MetricEstimate outage_fixed(const SystemConfig& cfg, double gamma_th);
MetricEstimate outage_fixed_asymptotic(const SystemConfig& cfg, double gamma_th);
double diversity_gain(const SystemConfig& cfg, DiversityReading reading = DiversityReading::Beta);
MetricEstimate ber_fixed(const SystemConfig& cfg, const ModulationScheme& mod);
MetricEstimate ber_fixed_asymptotic(const SystemConfig& cfg, const ModulationScheme& mod);
MetricEstimate capacity_fixed(const SystemConfig& cfg);
/// Gamma-Gamma optical hop, Nakagami-m RF hop, heterodyne detection.
MetricEstimate capacity_fixed_gg_nakagami(const SystemConfig& cfg);

// --- CSI-assisted relaying (min bound) ---------------------------------------------

MetricEstimate outage_csi(const SystemConfig& cfg, double gamma_th);
MetricEstimate ber_csi(const SystemConfig& cfg, const ModulationScheme& mod);
MetricEstimate capacity_csi(const SystemConfig& cfg);
/// Nakagami-m RF hop, heterodyne detection.
MetricEstimate capacity_csi_nakagami(const SystemConfig& cfg);
/// Capacity as the single integral (1/(2 ln 2)) int s e^{-s} M1(s) M2(s) ds
/// over the two complementary MGFs.
MetricEstimate capacity_csi_cmgf_quadrature(const SystemConfig& cfg);

// --- integral forms used as cross-checks -------------------------------------------

/// (phi/(2 G(p))) sum_j q_j^p int e^{-q_j x} x^{p-1} F(x) dx by quadrature.
double ber_from_cdf(const std::function<double(double)>& cdf, const ModulationScheme& mod);

}  // namespace fsorf
