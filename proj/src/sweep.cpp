#include "fsorf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "fsorf/errors.hpp"
#include "fsorf/montecarlo.hpp"

namespace fsorf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!value.empty() && value.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& token, const std::string& key) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (token.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError("'" + token + "' is not a finite number", 0, key);
  return v;
}

long long parse_integer(const std::string& token, const std::string& key) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
    throw ConfigError("'" + token + "' is not an integer", 0, key);
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

struct Turbulence {
  const char* name;
  double alpha;
  int beta;
};
constexpr Turbulence kTurbulence[] = {{"strong", 2.4, 2}, {"moderate", 4.2, 3}, {"weak", 5.4, 4}};

// Applies one system key to a configuration. Tokens are already canonical.
void apply(SystemConfig& s, const std::string& key, const std::string& tok) {
  if (key == "turbulence") {
    for (const auto& t : kTurbulence)
      if (tok == t.name) {
        s.fso.alpha = t.alpha;
        s.fso.beta = t.beta;
        return;
      }
    throw ConfigError("turbulence must be strong, moderate or weak", 0, key);
  }
  if (key == "relay") {
    if (tok == "fixed") {
      if (!s.fixed_gain()) s.relay = FixedGain{};
    } else if (tok == "csi") {
      s.relay = CsiAssisted{};
    } else {
      throw ConfigError("relay must be fixed or csi", 0, key);
    }
    return;
  }
  if (key == "beta") {
    s.fso.beta = static_cast<int>(parse_integer(tok, key));
    return;
  }
  if (key == "r") {
    const long long r = parse_integer(tok, key);
    if (r != 1 && r != 2) throw ConfigError("r must be 1 (heterodyne) or 2 (IM/DD)", 0, key);
    s.fso.r = static_cast<int>(r);
    return;
  }
  if (key == "n_antennas" || key == "l_interferers") {
    const long long n = parse_integer(tok, key);
    if (n < 1 || n > 1000) throw ConfigError("must be an integer in [1, 1000]", 0, key);
    (key == "n_antennas" ? s.rf_desired : s.rf_interf).delta = static_cast<int>(n);
    return;
  }
  const double v = parse_number(tok, key);
  if (key == "alpha") s.fso.alpha = v;
  else if (key == "g") s.fso.g = v;
  else if (key == "omega") s.fso.omega = v;
  else if (key == "b0") s.fso.b0 = v;
  else if (key == "rho") s.fso.rho = v;
  else if (key == "xi") s.fso.xi = v;
  else if (key == "m") s.rf_desired.m = v;
  else if (key == "kappa") s.rf_desired.kappa = v;
  else if (key == "m_i") s.rf_interf.m = v;
  else if (key == "kappa_i") s.rf_interf.kappa = v;
  else if (key == "mean_sir_db") {
    s.mean_sir = from_db(v);
    s.rf_desired.mean_snr = s.mean_sir * s.rf_interf.mean_snr;
  }
  else if (key == "gain_c") {
    if (!(v > 0.0)) throw ConfigError("gain_c must be positive", 0, key);
    if (s.fixed_gain()) std::get<FixedGain>(s.relay).C = v;
  } else {
    throw ConfigError("unknown key", 0, key);
  }
}

SystemConfig default_system() {
  SystemConfig s;
  s.fso.alpha = 2.4;
  s.fso.beta = 2;
  s.fso.g = 0.5;
  s.fso.omega = 1.0;
  s.fso.xi = 6.8;
  s.fso.r = 1;
  s.mean_sir = from_db(20.0);
  s.rf_desired = {2.5, 1.09, 2, s.mean_sir};
  s.rf_interf = {1.5, 3.5, 2, 1.0};
  s.relay = FixedGain{1.7};
  return s;
}

const std::vector<std::string> kSweepKeys = {
    "axis",  "start_db",    "stop_db",    "step_db", "metric",  "methods", "modulation", "mod_phi",
    "mod_p", "mod_q",       "gamma_th_db", "mc_samples", "seed", "threads", "output"};

Method parse_method(const std::string& tok) {
  if (tok == "analytic") return Method::Analytic;
  if (tok == "asymptotic") return Method::Asymptotic;
  if (tok == "mc" || tok == "monte_carlo" || tok == "monte-carlo") return Method::MonteCarlo;
  throw ConfigError("unknown method '" + tok + "'", 0, "methods");
}

struct ModParts {
  std::optional<double> phi, p;
  std::optional<std::vector<double>> q;
};

void set_sweep_key(SweepConfig& c, ModParts& mp, const std::string& key, const std::string& raw) {
  const std::string v = lower(raw);
  if (key == "axis") {
    if (v == "mu_r") c.axis = Axis::MuR;
    else if (v == "mu_r_over_gamma_th") c.axis = Axis::MuROverGammaTh;
    else throw ConfigError("axis must be mu_r or mu_r_over_gamma_th", 0, key);
  } else if (key == "start_db") {
    c.start_db = parse_number(v, key);
  } else if (key == "stop_db") {
    c.stop_db = parse_number(v, key);
  } else if (key == "step_db") {
    c.step_db = parse_number(v, key);
  } else if (key == "metric") {
    if (v == "outage") c.metric = Metric::Outage;
    else if (v == "ber") c.metric = Metric::Ber;
    else if (v == "capacity") c.metric = Metric::Capacity;
    else throw ConfigError("metric must be outage, ber or capacity", 0, key);
  } else if (key == "methods") {
    c.methods.clear();
    for (const auto& t : split_list(v)) {
      if (t.empty()) continue;
      const Method m = parse_method(t);
      if (std::find(c.methods.begin(), c.methods.end(), m) == c.methods.end()) c.methods.push_back(m);
    }
  } else if (key == "modulation") {
    c.modulation = v;
  } else if (key == "mod_phi") {
    mp.phi = parse_number(v, key);
  } else if (key == "mod_p") {
    mp.p = parse_number(v, key);
  } else if (key == "mod_q") {
    std::vector<double> q;
    for (const auto& t : split_list(v)) q.push_back(parse_number(t, key));
    mp.q = q;
  } else if (key == "gamma_th_db") {
    c.gamma_th_db = parse_number(v, key);
  } else if (key == "mc_samples") {
    c.mc_samples = parse_integer(v, key);
  } else if (key == "seed") {
    const long long s = parse_integer(v, key);
    if (s < 0) throw ConfigError("seed must be nonnegative", 0, key);
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_integer(v, key));
  } else if (key == "output") {
    c.output = trim(raw);
  }
}

void finish_modulation(SweepConfig& c, const ModParts& mp) {
  const bool any = mp.phi || mp.p || mp.q;
  if (c.modulation != "custom") {
    if (any) throw ConfigError("mod_phi/mod_p/mod_q need modulation = custom", 0, "modulation");
    c.custom_modulation.reset();
    return;
  }
  if (!(mp.phi && mp.p && mp.q))
    throw ConfigError("modulation = custom needs mod_phi, mod_p and mod_q", 0, "modulation");
  ModulationScheme m;
  m.name = "custom";
  m.phi = *mp.phi;
  m.p = *mp.p;
  m.q = *mp.q;
  m.n = static_cast<int>(m.q.size());
  c.custom_modulation = m;
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  return s;
}

std::string format_g(double v, int digits) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::Outage: return "outage";
    case Metric::Ber: return "ber";
    case Metric::Capacity: return "capacity";
  }
  return "?";
}

const char* axis_name(Axis a) { return a == Axis::MuR ? "mu_r" : "mu_r_over_gamma_th"; }

const std::vector<std::string>& system_keys() {
  static const std::vector<std::string> keys = {
      "turbulence", "alpha", "beta",    "g",       "omega",         "b0",          "rho",
      "xi",         "r",     "m",       "kappa",   "n_antennas",    "m_i",         "kappa_i",
      "l_interferers", "mean_sir_db", "relay", "gain_c"};
  return keys;
}

void SweepConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = system_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError("unknown key", 0, key);
  std::vector<std::string> tokens;
  for (const auto& raw : split_list(value)) {
    if (raw.empty()) throw ConfigError("empty list item", 0, key);
    std::string tok = lower(raw);
    // Canonicalize numbers so that serialization round-trips.
    if (key != "turbulence" && key != "relay") {
      if (key == "beta" || key == "r" || key == "n_antennas" || key == "l_interferers")
        tok = std::to_string(parse_integer(tok, key));
      else
        tok = format_number(parse_number(tok, key));
    }
    SystemConfig probe = default_system();
    apply(probe, key, tok);
    tokens.push_back(tok);
  }
  if (tokens.empty()) throw ConfigError("missing value", 0, key);
  for (auto& [k, v] : params)
    if (k == key) {
      v = tokens;
      return;
    }
  params.emplace_back(key, tokens);
}

void SweepConfig::validate() const {
  if (!(step_db > 0.0)) throw ConfigError("step_db must be positive", 0, "step_db");
  if (!(start_db < stop_db)) throw ConfigError("start_db must be below stop_db", 0, "start_db");
  if ((stop_db - start_db) / step_db > 10000) throw ConfigError("grid too large", 0, "step_db");
  if (methods.empty()) throw ConfigError("at least one method is required", 0, "methods");
  if (threads < 0) throw ConfigError("threads must be >= 0", 0, "threads");
  const bool mc = std::find(methods.begin(), methods.end(), Method::MonteCarlo) != methods.end();
  if (mc && mc_samples < kMinSamples)
    throw ConfigError("mc_samples must be at least " + std::to_string(kMinSamples), 0, "mc_samples");
  try {
    modulation_scheme().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), 0, "modulation");
  }
  (void)curves();
}

std::vector<double> SweepConfig::grid() const {
  std::vector<double> g;
  const long n = static_cast<long>(std::floor((stop_db - start_db) / step_db + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(start_db + static_cast<double>(i) * step_db);
  return g;
}

ModulationScheme SweepConfig::modulation_scheme() const {
  if (custom_modulation) return *custom_modulation;
  return fsorf::modulation(modulation);
}

std::vector<Curve> SweepConfig::curves() const {
  std::map<std::string, bool> present;
  for (const auto& [k, v] : params) present[k] = true;
  if (present.count("turbulence") && (present.count("alpha") || present.count("beta")))
    throw ConfigError("turbulence conflicts with alpha/beta", 0, "turbulence");
  const bool scattering = present.count("b0") || present.count("rho");
  if (scattering && !(present.count("b0") && present.count("rho")))
    throw ConfigError("b0 and rho must be given together", 0, present.count("b0") ? "rho" : "b0");
  if (scattering && present.count("g"))
    throw ConfigError("g conflicts with b0/rho (g = 2 b0 (1 - rho))", 0, "g");

  std::vector<Curve> out;
  std::vector<std::size_t> idx(params.size(), 0);
  while (true) {
    Curve c;
    c.system = default_system();
    std::optional<double> gain;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& [key, values] = params[i];
      if (key == "gain_c") gain = parse_number(values[idx[i]], key);
      else apply(c.system, key, values[idx[i]]);
      if (values.size() > 1) {
        if (!c.label.empty()) c.label += ';';
        c.label += key + "=" + values[idx[i]];
      }
    }
    // The gain belongs to the fixed-gain relay, whichever order the keys came in.
    if (gain && c.system.fixed_gain()) std::get<FixedGain>(c.system.relay).C = *gain;
    if (scattering) c.system.fso.g = 2.0 * *c.system.fso.b0 * (1.0 - *c.system.fso.rho);
    try {
      c.system.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string(e.what()) + (c.label.empty() ? "" : " (curve " + c.label + ")"));
    }
    out.push_back(std::move(c));
    std::size_t i = params.size();
    while (i > 0) {
      --i;
      if (++idx[i] < params[i].second.size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
    if (params.empty()) return out;
  }
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  ModParts mp;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno, "");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", lineno, "");
    if (seen.count(key))
      throw ConfigError("duplicate key (first on line " + std::to_string(seen[key]) + ")", lineno,
                        key);
    seen[key] = lineno;
    if (value.empty()) throw ConfigError("missing value", lineno, key);
    try {
      if (std::find(kSweepKeys.begin(), kSweepKeys.end(), key) != kSweepKeys.end())
        set_sweep_key(cfg, mp, key, value);
      else
        cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), lineno, key);
    }
  }
  auto at = [&](const std::string& key) { return seen.count(key) ? seen[key] : 0; };
  try {
    finish_modulation(cfg, mp);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), at(e.key()), e.key());
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), at(e.key()), e.key());
  }
  return cfg;
}

SweepConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const SweepConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, values] : cfg.params) {
    os << key << " = ";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
    os << '\n';
  }
  os << "axis = " << axis_name(cfg.axis) << '\n';
  os << "start_db = " << format_number(cfg.start_db) << '\n';
  os << "stop_db = " << format_number(cfg.stop_db) << '\n';
  os << "step_db = " << format_number(cfg.step_db) << '\n';
  os << "metric = " << metric_name(cfg.metric) << '\n';
  os << "methods = ";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    os << (i ? ", " : "") << method_name(cfg.methods[i]);
  os << '\n';
  os << "modulation = " << cfg.modulation << '\n';
  if (cfg.custom_modulation) {
    const auto& m = *cfg.custom_modulation;
    os << "mod_phi = " << format_number(m.phi) << '\n';
    os << "mod_p = " << format_number(m.p) << '\n';
    os << "mod_q = ";
    for (std::size_t i = 0; i < m.q.size(); ++i) os << (i ? ", " : "") << format_number(m.q[i]);
    os << '\n';
  }
  os << "gamma_th_db = " << format_number(cfg.gamma_th_db) << '\n';
  os << "mc_samples = " << cfg.mc_samples << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "threads = " << cfg.threads << '\n';
  if (!cfg.output.empty()) os << "output = " << cfg.output << '\n';
  return os.str();
}

// --- presets ---------------------------------------------------------------------------

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"fig2_outage_fixed",
       "Fixed-gain outage vs mu_r/gamma_th, strong turbulence, xi in {1.1, 6.8}, r in {1, 2}",
        "turbulence = strong\n"
        "xi = 1.1, 6.8\n"
        "r = 1, 2\n"
        "relay = fixed\n"
        "metric = outage\n"
        "axis = mu_r_over_gamma_th\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "gamma_th_db = 10\n"
        "methods = analytic, asymptotic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig2_outage_fixed_weak",
       "As fig2_outage_fixed in weak turbulence (alpha=5.4, beta=4)",
        "turbulence = weak\n"
        "xi = 1.1, 6.8\n"
        "r = 1, 2\n"
        "relay = fixed\n"
        "metric = outage\n"
        "axis = mu_r_over_gamma_th\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "gamma_th_db = 10\n"
        "methods = analytic, asymptotic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig3_outage_interferers",
       "Fixed-gain outage, strong turbulence, L in {1, 2}, xi in {1.1, 6.8}",
        "turbulence = strong\n"
        "xi = 1.1, 6.8\n"
        "l_interferers = 1, 2\n"
        "r = 1\n"
        "relay = fixed\n"
        "metric = outage\n"
        "axis = mu_r_over_gamma_th\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "gamma_th_db = 10\n"
        "methods = analytic, asymptotic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig4_ber_fading",
       "Fixed-gain BPSK BER, strong turbulence, RF fading m in {1.5, 2.5, 4}",
        "turbulence = strong\n"
        "xi = 6.8\n"
        "r = 1\n"
        "m = 1.5, 2.5, 4\n"
        "relay = fixed\n"
        "metric = ber\n"
        "modulation = bpsk\n"
        "axis = mu_r\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "methods = analytic, asymptotic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig5_ber_shadowing",
       "Fixed-gain BPSK BER, xi=6.8, r=2, kappa in {0.6, 1.09, 4}, N in {1, 2}",
        "turbulence = strong\n"
        "xi = 6.8\n"
        "r = 2\n"
        "kappa = 0.6, 1.09, 4\n"
        "n_antennas = 1, 2\n"
        "relay = fixed\n"
        "metric = ber\n"
        "modulation = bpsk\n"
        "axis = mu_r\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "methods = analytic, asymptotic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig6_capacity_turbulence",
       "Fixed-gain ergodic capacity, strong/moderate/weak turbulence, r in {1, 2}",
        "turbulence = strong, moderate, weak\n"
        "xi = 6.8\n"
        "r = 1, 2\n"
        "relay = fixed\n"
        "metric = capacity\n"
        "axis = mu_r\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "methods = analytic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig7_outage_csi_rho",
       "CSI-assisted outage, LOS coupling rho in {0.1, 0.5, 0.9}, r in {1, 2}",
        "turbulence = strong\n"
        "b0 = 0.25\n"
        "rho = 0.1, 0.5, 0.9\n"
        "xi = 6.8\n"
        "r = 1, 2\n"
        "relay = csi\n"
        "metric = outage\n"
        "axis = mu_r_over_gamma_th\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "gamma_th_db = 10\n"
        "methods = analytic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
      {"fig8_capacity_csi_shadowing",
       "CSI-assisted capacity, heavy/average/light shadowing, L in {1, 2}",
        "turbulence = strong\n"
        "xi = 6.8\n"
        "r = 1\n"
        "kappa = 1.0931, 4.0616, 75.9925\n"
        "l_interferers = 1, 2\n"
        "relay = csi\n"
        "metric = capacity\n"
        "axis = mu_r\n"
        "start_db = 0\n"
        "stop_db = 60\n"
        "step_db = 5\n"
        "methods = analytic, mc\n"
        "mc_samples = 1000000\n"
        "seed = 1\n"},
  };
  return table;
}

const Preset& preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}


// --- evaluation ------------------------------------------------------------------------

namespace {

SweepRow failed(double x, const std::string& method, const std::string& why) {
  SweepRow r;
  r.x_db = x;
  r.method = method;
  r.value = std::numeric_limits<double>::quiet_NaN();
  r.eval_error = sanitize(why.empty() ? std::string("evaluation failed") : why);
  return r;
}

SweepRow from_estimate(double x, const std::string& method, const MetricEstimate& e) {
  SweepRow r;
  r.x_db = x;
  r.method = method;
  r.value = e.value;
  r.std_err = e.std_err;
  if (e.eval_error) r.eval_error = format_g(*e.eval_error, 3);
  return r;
}

MetricEstimate closed_form(const SystemConfig& s, Metric metric, Method method, double gamma_th,
                           const ModulationScheme& mod) {
  const bool fixed = s.fixed_gain();
  if (method == Method::Analytic) {
    switch (metric) {
      case Metric::Outage: return fixed ? outage_fixed(s, gamma_th) : outage_csi(s, gamma_th);
      case Metric::Ber: return fixed ? ber_fixed(s, mod) : ber_csi(s, mod);
      case Metric::Capacity: return fixed ? capacity_fixed(s) : capacity_csi(s);
    }
  }
  if (!fixed) throw DomainError("no high-SNR expansion for the CSI-assisted relay");
  switch (metric) {
    case Metric::Outage: return outage_fixed_asymptotic(s, gamma_th);
    case Metric::Ber: return ber_fixed_asymptotic(s, mod);
    case Metric::Capacity: break;
  }
  throw DomainError("no high-SNR expansion for the capacity");
}

}  // namespace

namespace {

SystemConfig at_point(const SweepConfig& cfg, const Curve& curve, double x_db) {
  SystemConfig s = curve.system;
  s.fso.mu_r = cfg.axis == Axis::MuR ? from_db(x_db) : from_db(cfg.gamma_th_db) * from_db(x_db);
  return s;
}

SimResult simulate_point(const SweepConfig& cfg, const SystemConfig& s, int mc_threads) {
  SimPlan plan;
  plan.config = s;
  plan.n_samples = cfg.mc_samples;
  plan.seed = cfg.seed;
  plan.outage = cfg.metric == Metric::Outage;
  plan.ber = cfg.metric == Metric::Ber;
  plan.capacity = cfg.metric == Metric::Capacity;
  plan.gamma_th = from_db(cfg.gamma_th_db);
  plan.modulation = cfg.modulation_scheme();
  plan.threads = mc_threads;
  return simulate(plan);
}

MetricEstimate pick(const SimResult& res, Metric metric, bool bound) {
  switch (metric) {
    case Metric::Outage: return bound ? *res.outage_min : *res.outage;
    case Metric::Ber: return bound ? *res.ber_min : *res.ber;
    case Metric::Capacity: return bound ? *res.capacity_min : *res.capacity;
  }
  return *res.outage;
}

}  // namespace

MetricEstimate evaluate_metric(const SweepConfig& cfg, const Curve& curve, double x_db, Method method,
                               int mc_threads) {
  const SystemConfig s = at_point(cfg, curve, x_db);
  if (method == Method::MonteCarlo) return pick(simulate_point(cfg, s, mc_threads), cfg.metric, false);
  return closed_form(s, cfg.metric, method, from_db(cfg.gamma_th_db), cfg.modulation_scheme());
}

std::vector<SweepRow> evaluate_point(const SweepConfig& cfg, const Curve& curve, double x_db,
                                     int mc_threads, const std::string& suffix) {
  std::vector<SweepRow> rows;
  for (Method m : cfg.methods) {
    const std::string name = std::string(method_name(m)) + suffix;
    try {
      if (m != Method::MonteCarlo) {
        rows.push_back(from_estimate(x_db, name, evaluate_metric(cfg, curve, x_db, m, mc_threads)));
        continue;
      }
      const SystemConfig s = at_point(cfg, curve, x_db);
      const SimResult r = simulate_point(cfg, s, mc_threads);
      rows.push_back(from_estimate(x_db, name, pick(r, cfg.metric, false)));
      if (!s.fixed_gain()) rows.push_back(from_estimate(x_db, "mc_min" + suffix, pick(r, cfg.metric, true)));
    } catch (const std::exception& e) {
      rows.push_back(failed(x_db, name, e.what()));
    }
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto curves = cfg.curves();
  const auto grid = cfg.grid();
  const bool multi = curves.size() > 1;

  struct Task {
    const Curve* curve;
    double x;
    std::vector<SweepRow> rows;
  };
  std::vector<Task> tasks;
  for (const auto& c : curves)
    for (double x : grid) tasks.push_back({&c, x, {}});

  const int threads = std::max(1, cfg.threads > 0 ? cfg.threads : default_threads());
  const int workers = std::min<int>(threads, static_cast<int>(tasks.size()));
  const int mc_threads = std::max(1, threads / std::max(1, workers));

  auto run = [&](Task& t) {
    t.rows = evaluate_point(cfg, *t.curve, t.x, mc_threads, multi ? "@" + t.curve->label : "");
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) run(tasks[i]);
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SweepRow> rows;
  for (auto& t : tasks) rows.insert(rows.end(), t.rows.begin(), t.rows.end());
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "x_db,method,value,std_err,eval_error\n";
  for (const auto& r : rows) {
    out << format_number(r.x_db) << ',' << r.method << ',' << format_g(r.value, 10) << ','
        << (r.std_err ? format_g(*r.std_err, 6) : "") << ',' << r.eval_error << '\n';
  }
}

void run_sweep_file(const std::string& config_path) {
  const SweepConfig cfg = load_config(config_path);
  const auto rows = run_sweep(cfg);
  if (cfg.output.empty() || cfg.output == "-") {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw ConfigError("cannot write output file '" + cfg.output + "'", 0, "output");
  write_csv(out, rows);
}

}  // namespace fsorf
