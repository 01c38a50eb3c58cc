#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fsorf/errors.hpp"
#include "fsorf/sweep.hpp"

using namespace fsorf;

namespace {

int error_line(const std::string& text, std::string* key = nullptr) {
  try {
    parse_config_string(text).curves();
  } catch (const ConfigError& e) {
    if (key) *key = e.key();
    return e.line();
  }
  return -1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config errors carry line and key") {
  std::string key;
  CHECK(error_line("xi = 1.1\nfoo = 2\n", &key) == 2);
  CHECK(key == "foo");
  CHECK(error_line("# comment\n\nxi = abc\n", &key) == 3);
  CHECK(key == "xi");
  CHECK(error_line("xi = 1.1\nxi = 2\n", &key) == 2);
  CHECK(error_line("no equals sign\n") == 1);
  CHECK(error_line("r = 3\n", &key) > 0);
  CHECK(error_line("metric = speed\n", &key) == 1);
  CHECK(key == "metric");
  CHECK(error_line("step_db = 0\n") != -1);
  CHECK(error_line("b0 = 0.25\n") != -1);  // needs rho too
  CHECK(error_line("xi = 6.8 # trailing comment\n") == -1);
}

TEST_CASE("dB keys are converted once") {
  const auto cfg = parse_config_string("mean_sir_db = 30\nmethods = analytic\n");
  const auto c = cfg.curves();
  REQUIRE(c.size() == 1);
  CHECK(c[0].system.mean_sir == doctest::Approx(1000.0));
  CHECK(cfg.grid().front() == 0.0);
}

TEST_CASE("comma lists expand to one curve per combination") {
  const auto cfg = parse_config_string("xi = 1.1, 6.8\nr = 1, 2\nl_interferers = 1\n");
  const auto c = cfg.curves();
  REQUIRE(c.size() == 4);
  CHECK(c[0].label == "xi=1.1;r=1");
  CHECK(c[1].label == "xi=1.1;r=2");
  CHECK(c[3].label == "xi=6.8;r=2");
  CHECK(c[3].system.fso.r == 2);
}

TEST_CASE("serialization round-trips") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const auto a = parse_config_string(p.text);
    const auto text = serialize_config(a);
    const auto b = parse_config_string(text);
    CHECK(serialize_config(b) == text);
    CHECK(b.curves().size() == a.curves().size());
    CHECK(b.grid() == a.grid());
  }
}

TEST_CASE("preset files match the built-in presets") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const std::string file = read_file(std::string(FSORF_PRESET_DIR) + "/" + p.name + ".conf");
    CHECK(file == "# " + p.description + "\n" + p.text);
    CHECK_NOTHROW(load_config(std::string(FSORF_PRESET_DIR) + "/" + p.name + ".conf").curves());
  }
  CHECK_THROWS_AS(preset("fig99"), ConfigError);
}

TEST_CASE("CSV layout and failed rows") {
  auto cfg = parse_config_string(
      "relay = csi\nmetric = outage\nmethods = analytic, asymptotic\nstart_db = 10\nstop_db = 20\nstep_db = 10\n");
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == "analytic");
  CHECK(rows[1].method == "asymptotic");
  CHECK(std::isnan(rows[1].value));
  CHECK(!rows[1].eval_error.empty());
  std::ostringstream os;
  write_csv(os, rows);
  const std::string csv = os.str();
  CHECK(csv.rfind("x_db,method,value,std_err,eval_error\n", 0) == 0);
  CHECK(csv.find("nan") != std::string::npos);
  // The failure message must not break the column count.
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) CHECK(std::count(line.begin(), line.end(), ',') == 4);
}

TEST_CASE("Monte-Carlo sweeps are deterministic") {
  auto cfg = parse_config_string(
      "metric = capacity\nmethods = mc\nmc_samples = 20000\nseed = 4\nstart_db = 10\nstop_db = 30\nstep_db = 10\n");
  cfg.threads = 1;
  std::ostringstream a, b;
  write_csv(a, run_sweep(cfg));
  cfg.threads = 2;
  write_csv(b, run_sweep(cfg));
  CHECK(a.str() == b.str());
}

TEST_CASE("CSI Monte-Carlo emits exact and min-bound rows") {
  const auto cfg = parse_config_string(
      "relay = csi\nmetric = outage\nmethods = mc\nmc_samples = 10000\nstart_db = 10\nstop_db = 20\nstep_db = 10\n");
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == "mc");
  CHECK(rows[1].method == "mc_min");
  CHECK(rows[0].value >= rows[1].value);
  CHECK(rows[0].std_err.has_value());
}

TEST_CASE("axis selects mu_r or mu_r / gamma_th") {
  auto cfg = parse_config_string("metric = outage\ngamma_th_db = 10\nstart_db = 20\nstop_db = 30\nstep_db = 10\n");
  const double over = run_sweep(cfg)[0].value;
  cfg.axis = Axis::MuR;
  cfg.start_db = 30;
  cfg.stop_db = 40;
  CHECK(run_sweep(cfg)[0].value == doctest::Approx(over).epsilon(1e-12));
}
