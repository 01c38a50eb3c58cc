#include "fsorf/fsorf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "fsorf/errors.hpp"
#include "fsorf/montecarlo.hpp"
#include "fsorf/sweep.hpp"
#include "fsorf/validation.hpp"

struct fsorf_config {
  fsorf::SweepConfig cfg;
};

struct fsorf_sweep {
  std::vector<fsorf::SweepRow> rows;
  std::string output;
};

struct fsorf_report {
  std::vector<fsorf::CheckResult> checks;
  std::vector<std::string> lines;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;
thread_local int g_error_line = 0;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

fsorf_status fail(fsorf_status st, const std::string& msg) {
  g_error = msg;
  g_error_key.clear();
  g_error_line = 0;
  return st;
}

// Runs f, translating exceptions into status codes.
template <class F>
fsorf_status guard(F&& f) {
  try {
    f();
    return FSORF_OK;
  } catch (const fsorf::ConfigError& e) {
    fail(FSORF_ERR_CONFIG, e.what());
    g_error_line = e.line();
    g_error_key = e.key();
    return FSORF_ERR_CONFIG;
  } catch (const fsorf::DomainError& e) {
    return fail(FSORF_ERR_DOMAIN, e.what());
  } catch (const fsorf::ConvergenceError& e) {
    return fail(FSORF_ERR_CONVERGENCE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FSORF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FSORF_ERR_INTERNAL, e.what());
  }
}

fsorf::Method to_method(fsorf_method m) {
  switch (m) {
    case FSORF_ANALYTIC: return fsorf::Method::Analytic;
    case FSORF_ASYMPTOTIC: return fsorf::Method::Asymptotic;
    case FSORF_MONTE_CARLO: return fsorf::Method::MonteCarlo;
  }
  throw fsorf::DomainError("unknown method");
}

fsorf::Metric to_metric(fsorf_metric m) {
  switch (m) {
    case FSORF_OUTAGE: return fsorf::Metric::Outage;
    case FSORF_BER: return fsorf::Metric::Ber;
    case FSORF_CAPACITY: return fsorf::Metric::Capacity;
  }
  throw fsorf::DomainError("unknown metric");
}

fsorf_check view(const fsorf::CheckResult& r) {
  return {r.id, r.name.c_str(), r.passed ? 1 : 0, r.informational ? 1 : 0, r.detail.c_str(), r.seconds};
}

}  // namespace

extern "C" {

const char* fsorf_version(void) { return "0.1.0"; }
const char* fsorf_last_error(void) { return g_error.c_str(); }
int fsorf_last_error_line(void) { return g_error_line; }
const char* fsorf_last_error_key(void) { return g_error_key.c_str(); }

const char* fsorf_status_name(fsorf_status status) {
  switch (status) {
    case FSORF_OK: return "ok";
    case FSORF_ERR_DOMAIN: return "domain error";
    case FSORF_ERR_CONVERGENCE: return "convergence failure";
    case FSORF_ERR_CONFIG: return "configuration error";
    case FSORF_ERR_ARGUMENT: return "invalid argument";
    case FSORF_ERR_IO: return "i/o error";
    case FSORF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int fsorf_default_threads(void) { return fsorf::default_threads(); }

fsorf_status fsorf_config_load(const char* path, fsorf_config** out) {
  if (!path || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_load: NULL argument");
  *out = nullptr;
  return guard([&] { *out = new fsorf_config{fsorf::load_config(path)}; });
}

fsorf_status fsorf_config_parse(const char* text, fsorf_config** out) {
  if (!text || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_parse: NULL argument");
  *out = nullptr;
  return guard([&] { *out = new fsorf_config{fsorf::parse_config_string(text)}; });
}

fsorf_status fsorf_config_from_preset(const char* name, fsorf_config** out) {
  if (!name || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_from_preset: NULL argument");
  *out = nullptr;
  return guard([&] { *out = new fsorf_config{fsorf::parse_config_string(fsorf::preset(name).text)}; });
}

void fsorf_config_free(fsorf_config* cfg) { delete cfg; }

fsorf_status fsorf_config_set(fsorf_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_set: NULL argument");
  return guard([&] {
    // Round-trip through the parser so sweep keys and system keys share one path.
    std::string text = fsorf::serialize_config(cfg->cfg);
    std::string kept;
    std::size_t pos = 0;
    const std::string k = key;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(pos, end - pos);
      const std::size_t eq = line.find('=');
      std::string lk = eq == std::string::npos ? "" : line.substr(0, eq);
      while (!lk.empty() && lk.back() == ' ') lk.pop_back();
      if (lk != k) kept += line + '\n';
      pos = end + 1;
    }
    kept += k + " = " + value + '\n';
    cfg->cfg = fsorf::parse_config_string(kept);
  });
}

fsorf_status fsorf_config_serialize(const fsorf_config* cfg, char** out) {
  if (!cfg || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_serialize: NULL argument");
  *out = nullptr;
  return guard([&] {
    const std::string s = fsorf::serialize_config(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
  });
}

void fsorf_string_free(char* s) { std::free(s); }

fsorf_status fsorf_config_curve_count(const fsorf_config* cfg, size_t* out) {
  if (!cfg || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_config_curve_count: NULL argument");
  return guard([&] { *out = cfg->cfg.curves().size(); });
}

fsorf_status fsorf_evaluate(const fsorf_config* cfg, size_t curve, fsorf_metric metric,
                            fsorf_method method, double x_db, fsorf_value* out) {
  if (!cfg || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_evaluate: NULL argument");
  fsorf_status arg = FSORF_OK;
  const fsorf_status st = guard([&] {
    fsorf::SweepConfig c = cfg->cfg;
    c.metric = to_metric(metric);
    c.methods = {to_method(method)};
    c.validate();
    const auto curves = c.curves();
    if (curve >= curves.size()) {
      arg = fail(FSORF_ERR_ARGUMENT, "fsorf_evaluate: curve index out of range");
      return;
    }
    const auto e = fsorf::evaluate_metric(c, curves[curve], x_db, to_method(method), c.threads);
    out->value = e.value;
    out->std_err = e.std_err ? *e.std_err : kNaN;
    out->eval_error = e.eval_error ? *e.eval_error : kNaN;
  });
  return arg != FSORF_OK ? arg : st;
}

fsorf_status fsorf_sweep_run(const fsorf_config* cfg, fsorf_sweep** out) {
  if (!cfg || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_sweep_run: NULL argument");
  *out = nullptr;
  return guard([&] {
    auto* s = new fsorf_sweep{fsorf::run_sweep(cfg->cfg), cfg->cfg.output == "-" ? "" : cfg->cfg.output};
    *out = s;
  });
}

size_t fsorf_sweep_row_count(const fsorf_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

fsorf_status fsorf_sweep_row(const fsorf_sweep* sweep, size_t index, fsorf_row* out) {
  if (!sweep || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_sweep_row: NULL argument");
  if (index >= sweep->rows.size()) return fail(FSORF_ERR_ARGUMENT, "fsorf_sweep_row: index out of range");
  const auto& r = sweep->rows[index];
  *out = {r.x_db, r.method.c_str(), r.value, r.std_err ? *r.std_err : kNaN, r.eval_error.c_str()};
  return FSORF_OK;
}

fsorf_status fsorf_sweep_write_csv(const fsorf_sweep* sweep, const char* path) {
  if (!sweep) return fail(FSORF_ERR_ARGUMENT, "fsorf_sweep_write_csv: NULL sweep");
  return guard([&] {
    if (!path || !*path || std::strcmp(path, "-") == 0) {
      fsorf::write_csv(std::cout, sweep->rows);
      std::cout.flush();
      return;
    }
    std::ofstream f(path);
    if (!f) throw fsorf::ConfigError(std::string("cannot write output file '") + path + "'", 0, "output");
    fsorf::write_csv(f, sweep->rows);
  });
}

const char* fsorf_sweep_output(const fsorf_sweep* sweep) { return sweep ? sweep->output.c_str() : ""; }

void fsorf_sweep_free(fsorf_sweep* sweep) { delete sweep; }

size_t fsorf_preset_count(void) { return fsorf::presets().size(); }

const char* fsorf_preset_name(size_t i) {
  return i < fsorf::presets().size() ? fsorf::presets()[i].name.c_str() : nullptr;
}

const char* fsorf_preset_description(size_t i) {
  return i < fsorf::presets().size() ? fsorf::presets()[i].description.c_str() : nullptr;
}

const char* fsorf_preset_text(size_t i) {
  return i < fsorf::presets().size() ? fsorf::presets()[i].text.c_str() : nullptr;
}

void fsorf_validate_options_init(fsorf_validate_options* opts) {
  if (!opts) return;
  const fsorf::SuiteOptions d;
  *opts = {d.mc_samples, d.ks_samples, d.seed, d.threads, 0, nullptr, 0, nullptr, nullptr};
}

fsorf_status fsorf_validate(const fsorf_validate_options* opts, fsorf_report** out) {
  if (!out) return fail(FSORF_ERR_ARGUMENT, "fsorf_validate: NULL argument");
  *out = nullptr;
  fsorf_validate_options o;
  fsorf_validate_options_init(&o);
  if (opts) o = *opts;
  return guard([&] {
    fsorf::SuiteOptions s;
    s.mc_samples = o.mc_samples;
    s.ks_samples = o.ks_samples;
    s.seed = o.seed;
    s.threads = o.threads;
    s.corrupt_bk = o.corrupt_bk != 0;
    if (o.only) s.only.assign(o.only, o.only + o.n_only);
    if (s.mc_samples < fsorf::kMinSamples)
      throw fsorf::ConfigError("mc_samples must be at least " + std::to_string(fsorf::kMinSamples));
    if (s.ks_samples < 100) throw fsorf::ConfigError("ks_samples must be at least 100");
    if (o.on_check)
      s.on_result = [&](const fsorf::CheckResult& r) {
        const fsorf_check c = view(r);
        const std::string line = fsorf::format_check(r);
        o.on_check(&c, line.c_str(), o.user);
      };
    auto* rep = new fsorf_report{fsorf::run_validation(s), {}};
    for (const auto& r : rep->checks) rep->lines.push_back(fsorf::format_check(r));
    *out = rep;
  });
}

size_t fsorf_report_count(const fsorf_report* report) { return report ? report->checks.size() : 0; }

fsorf_status fsorf_report_check(const fsorf_report* report, size_t index, fsorf_check* out) {
  if (!report || !out) return fail(FSORF_ERR_ARGUMENT, "fsorf_report_check: NULL argument");
  if (index >= report->checks.size())
    return fail(FSORF_ERR_ARGUMENT, "fsorf_report_check: index out of range");
  *out = view(report->checks[index]);
  return FSORF_OK;
}

const char* fsorf_report_line(const fsorf_report* report, size_t index) {
  return report && index < report->lines.size() ? report->lines[index].c_str() : nullptr;
}

int fsorf_report_passed(const fsorf_report* report) {
  if (!report) return 0;
  for (const auto& r : report->checks)
    if (!r.informational && !r.passed) return 0;
  return 1;
}

void fsorf_report_free(fsorf_report* report) { delete report; }

}  // extern "C"
