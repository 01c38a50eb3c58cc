#pragma once

// Sweep configuration files, figure-regime presets and the CSV sweep runner.
//
// A config is a `key = value` text file; `#` starts a comment. SNR-like keys
// end in `_db` and are converted to linear exactly once, when curves are
// built. Any system key may hold a comma-separated list; the sweep then runs
// one curve per combination, in the order the keys appear.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsorf/channels.hpp"
#include "fsorf/metrics.hpp"

namespace fsorf {

enum class Metric { Outage, Ber, Capacity };
enum class Axis { MuR, MuROverGammaTh };

const char* metric_name(Metric m);
const char* axis_name(Axis a);

/// One system configuration of a sweep, with a label naming its list values.
struct Curve {
  std::string label;  // e.g. "xi=1.1;r=2"; empty for single-curve sweeps
  SystemConfig system;
};

struct SweepConfig {
  // System keys in file order, each with its canonical value tokens.
  std::vector<std::pair<std::string, std::vector<std::string>>> params;
  Axis axis = Axis::MuROverGammaTh;
  double start_db = 0.0, stop_db = 60.0, step_db = 5.0;
  Metric metric = Metric::Outage;
  std::vector<Method> methods{Method::Analytic};
  std::string modulation = "bpsk";
  std::optional<ModulationScheme> custom_modulation;  // modulation = custom
  double gamma_th_db = 10.0;
  long long mc_samples = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output;  // empty or "-": standard output

  void validate() const;
  std::vector<double> grid() const;
  std::vector<Curve> curves() const;
  ModulationScheme modulation_scheme() const;
  /// Sets (or replaces) a system key; the value may be a comma list.
  void set(const std::string& key, const std::string& value);
};

/// Throws ConfigError carrying the line number and key of the first problem.
SweepConfig parse_config(std::istream& in);
SweepConfig parse_config_string(const std::string& text);
SweepConfig load_config(const std::string& path);
std::string serialize_config(const SweepConfig& cfg);

/// Documented config keys, in serialization order.
const std::vector<std::string>& system_keys();

struct Preset {
  std::string name;
  std::string description;
  std::string text;  // config file body
};
const std::vector<Preset>& presets();
const Preset& preset(const std::string& name);

struct SweepRow {
  double x_db = 0.0;
  std::string method;  // method name, "@label" appended for multi-curve sweeps
  double value = 0.0;
  std::optional<double> std_err;
  std::string eval_error;  // numeric error bound, or the failure message
};

/// One method of cfg's metric for one curve at one grid point; throws on
/// failure. Monte-Carlo reports the exact end-to-end SINR.
MetricEstimate evaluate_metric(const SweepConfig& cfg, const Curve& curve, double x_db, Method method,
                               int mc_threads = 0);

/// All of cfg's methods for one curve at one grid point. `suffix` is appended
/// to the method names; mc_threads = 0 uses default_threads().
std::vector<SweepRow> evaluate_point(const SweepConfig& cfg, const Curve& curve, double x_db,
                                     int mc_threads = 0, const std::string& suffix = "");

/// Rows in grid order: curve, then x, then method. Evaluator failures become
/// NaN rows with a message; they never abort the sweep.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// run_sweep + write_csv to cfg.output.
void run_sweep_file(const std::string& config_path);

}  // namespace fsorf
