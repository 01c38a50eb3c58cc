// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 validation failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsorf/fsorf.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

int report_error(fsorf_status st, const std::string& context) {
  std::string where;
  if (st == FSORF_ERR_CONFIG && fsorf_last_error_line() > 0)
    where = ":" + std::to_string(fsorf_last_error_line());
  std::string key = fsorf_last_error_key();
  std::fprintf(stderr, "fsorf: %s%s: %s%s%s\n", context.c_str(), where.c_str(),
               key.empty() ? "" : ("key '" + key + "': ").c_str(), fsorf_last_error(),
               st == FSORF_ERR_CONFIG ? "" : (std::string(" (") + fsorf_status_name(st) + ")").c_str());
  return kExitConfig;
}

int cmd_sweep(const std::string& path, const std::string& output, int threads,
              const std::vector<std::string>& overrides) {
  fsorf_config* cfg = nullptr;
  fsorf_status st = fsorf_config_load(path.c_str(), &cfg);
  if (st != FSORF_OK) return report_error(st, path);
  auto set = [&](const std::string& k, const std::string& v) {
    const fsorf_status s = fsorf_config_set(cfg, k.c_str(), v.c_str());
    if (s != FSORF_OK) report_error(s, "--set " + k);
    return s == FSORF_OK;
  };
  bool ok = true;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "fsorf: --set expects key=value, got '%s'\n", kv.c_str());
      ok = false;
      break;
    }
    auto trim = [](std::string s) {
      while (!s.empty() && s.back() == ' ') s.pop_back();
      while (!s.empty() && s.front() == ' ') s.erase(s.begin());
      return s;
    };
    if (!(ok = set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1))))) break;
  }
  if (ok && threads > 0) ok = set("threads", std::to_string(threads));
  if (ok && !output.empty()) ok = set("output", output);
  if (!ok) {
    fsorf_config_free(cfg);
    return kExitConfig;
  }

  fsorf_sweep* sweep = nullptr;
  st = fsorf_sweep_run(cfg, &sweep);
  fsorf_config_free(cfg);
  if (st != FSORF_OK) return report_error(st, path);
  st = fsorf_sweep_write_csv(sweep, fsorf_sweep_output(sweep));
  size_t failed = 0;
  for (size_t i = 0; i < fsorf_sweep_row_count(sweep); ++i) {
    fsorf_row row;
    if (fsorf_sweep_row(sweep, i, &row) == FSORF_OK && row.value != row.value) ++failed;
  }
  fsorf_sweep_free(sweep);
  if (st != FSORF_OK) return report_error(st, "output");
  if (failed) std::fprintf(stderr, "fsorf: %zu row(s) could not be evaluated (NaN, see eval_error)\n", failed);
  return 0;
}

void print_line(const fsorf_check*, const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

int cmd_validate(bool quick, long long samples, long long ks_samples, unsigned long long seed,
                 int threads, const std::vector<int>& only, bool corrupt_bk) {
  fsorf_validate_options o;
  fsorf_validate_options_init(&o);
  if (quick) {
    o.mc_samples = 100000;
    o.ks_samples = 20000;
  }
  if (samples > 0) o.mc_samples = samples;
  if (ks_samples > 0) o.ks_samples = ks_samples;
  if (seed > 0) o.seed = seed;
  o.threads = threads;
  o.corrupt_bk = corrupt_bk ? 1 : 0;
  o.only = only.empty() ? nullptr : only.data();
  o.n_only = only.size();
  o.on_check = print_line;

  fsorf_report* rep = nullptr;
  const fsorf_status st = fsorf_validate(&o, &rep);
  if (st != FSORF_OK) return report_error(st, "validate");
  size_t gating = 0, passed = 0;
  for (size_t i = 0; i < fsorf_report_count(rep); ++i) {
    fsorf_check c;
    fsorf_report_check(rep, i, &c);
    if (c.informational) continue;
    ++gating;
    passed += c.passed ? 1 : 0;
  }
  const bool ok = fsorf_report_passed(rep) != 0;
  fsorf_report_free(rep);
  std::printf("%zu/%zu checks passed\n", passed, gating);
  return ok ? 0 : kExitValidation;
}

int cmd_presets_list() {
  for (size_t i = 0; i < fsorf_preset_count(); ++i)
    std::printf("%-30s %s\n", fsorf_preset_name(i), fsorf_preset_description(i));
  return 0;
}

int cmd_presets_show(const std::string& name) {
  for (size_t i = 0; i < fsorf_preset_count(); ++i)
    if (name == fsorf_preset_name(i)) {
      std::printf("# %s\n%s", fsorf_preset_description(i), fsorf_preset_text(i));
      return 0;
    }
  std::fprintf(stderr, "fsorf: unknown preset '%s' (try 'fsorf presets list')\n", name.c_str());
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed FSO/RF dual-hop relaying: closed-form metrics, sweeps and validation"};
  app.set_version_flag("--version", std::string(fsorf_version()));
  app.require_subcommand(1);

  std::string config_path, output;
  int threads = 0;
  std::vector<std::string> overrides;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a config file over its SNR grid; CSV to stdout or `output`");
  sweep->add_option("config", config_path, "key = value config file")->required();
  sweep->add_option("-o,--output", output, "CSV destination, overrides the config's `output`");
  sweep->add_option("-t,--threads", threads, "worker threads (default: FSORF_THREADS or all cores)");
  sweep->add_option("-s,--set", overrides, "override a config key, key=value (repeatable)");

  bool quick = false, corrupt_bk = false;
  long long samples = 0, ks_samples = 0;
  unsigned long long seed = 0;
  std::vector<int> only;
  int vthreads = 0;
  auto* validate = app.add_subcommand("validate", "Run the cross-validation battery; exit 2 if any check fails");
  validate->add_flag("--quick", quick, "1e5 Monte-Carlo samples per point instead of 1e7");
  validate->add_option("--samples", samples, "Monte-Carlo samples per grid point");
  validate->add_option("--ks-samples", ks_samples, "samples per Kolmogorov-Smirnov test");
  validate->add_option("--seed", seed, "base seed");
  validate->add_option("--only", only, "run only these criteria (0 = auxiliary checks)")->delimiter(',');
  validate->add_option("-t,--threads", vthreads, "Monte-Carlo threads");
  validate->add_flag("--corrupt-bk", corrupt_bk, "negative control: perturb b_1 so the constant check fails");

  auto* presets_cmd = app.add_subcommand("presets", "Figure-regime config presets");
  presets_cmd->require_subcommand(1);
  auto* list = presets_cmd->add_subcommand("list", "List preset names");
  std::string preset_name;
  auto* show = presets_cmd->add_subcommand("show", "Print a preset's config text");
  show->add_option("name", preset_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*sweep) return cmd_sweep(config_path, output, threads, overrides);
  if (*validate) return cmd_validate(quick, samples, ks_samples, seed, vthreads, only, corrupt_bk);
  if (*list) return cmd_presets_list();
  if (*show) return cmd_presets_show(preset_name);
  return kExitConfig;
}
