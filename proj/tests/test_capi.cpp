#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>

#include "fsorf/fsorf.h"

TEST_CASE("C API: parse errors report status, line and key") {
  fsorf_config* cfg = nullptr;
  CHECK(fsorf_config_parse("xi = 1.1\nbogus = 1\n", &cfg) == FSORF_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(fsorf_last_error_line() == 2);
  CHECK(std::string(fsorf_last_error_key()) == "bogus");
  CHECK(std::strlen(fsorf_last_error()) > 0);
  CHECK(fsorf_config_parse(nullptr, &cfg) == FSORF_ERR_ARGUMENT);
  CHECK(fsorf_config_load("/nonexistent/file.conf", &cfg) == FSORF_ERR_CONFIG);
}

TEST_CASE("C API: evaluate a point") {
  fsorf_config* cfg = nullptr;
  REQUIRE(fsorf_config_parse("xi = 1.1\nr = 2\naxis = mu_r\n", &cfg) == FSORF_OK);
  fsorf_value v;
  REQUIRE(fsorf_evaluate(cfg, 0, FSORF_OUTAGE, FSORF_ANALYTIC, 20.0, &v) == FSORF_OK);
  // mu_r / gamma_th = 10 dB, the same point as the frozen CDF value at x = 100, mu_r = 30 dB.
  CHECK(v.value == doctest::Approx(0.40085349).epsilon(1e-6));
  CHECK(std::isnan(v.std_err));
  CHECK(fsorf_evaluate(cfg, 1, FSORF_OUTAGE, FSORF_ANALYTIC, 20.0, &v) == FSORF_ERR_ARGUMENT);
  REQUIRE(fsorf_config_set(cfg, "relay", "csi") == FSORF_OK);
  CHECK(fsorf_evaluate(cfg, 0, FSORF_OUTAGE, FSORF_ASYMPTOTIC, 20.0, &v) == FSORF_ERR_DOMAIN);
  CHECK(fsorf_config_set(cfg, "nonsense", "1") == FSORF_ERR_CONFIG);
  fsorf_config_free(cfg);
}

TEST_CASE("C API: sweep rows and serialization") {
  fsorf_config* cfg = nullptr;
  REQUIRE(fsorf_config_from_preset("fig4_ber_fading", &cfg) == FSORF_OK);
  size_t curves = 0;
  REQUIRE(fsorf_config_curve_count(cfg, &curves) == FSORF_OK);
  CHECK(curves == 3);
  REQUIRE(fsorf_config_set(cfg, "methods", "analytic") == FSORF_OK);
  REQUIRE(fsorf_config_set(cfg, "step_db", "30") == FSORF_OK);
  char* text = nullptr;
  REQUIRE(fsorf_config_serialize(cfg, &text) == FSORF_OK);
  CHECK(std::string(text).find("step_db = 30") != std::string::npos);
  fsorf_string_free(text);

  fsorf_sweep* sw = nullptr;
  REQUIRE(fsorf_sweep_run(cfg, &sw) == FSORF_OK);
  CHECK(fsorf_sweep_row_count(sw) == 9);
  fsorf_row row;
  REQUIRE(fsorf_sweep_row(sw, 0, &row) == FSORF_OK);
  CHECK(std::string(row.method) == "analytic@m=1.5");
  CHECK(row.value > 0.0);
  CHECK(fsorf_sweep_row(sw, 9, &row) == FSORF_ERR_ARGUMENT);
  fsorf_sweep_free(sw);
  fsorf_config_free(cfg);
  CHECK(fsorf_config_from_preset("nope", &cfg) == FSORF_ERR_CONFIG);
}

TEST_CASE("C API: presets") {
  REQUIRE(fsorf_preset_count() >= 8);
  CHECK(std::string(fsorf_preset_name(0)).size() > 0);
  CHECK(fsorf_preset_name(fsorf_preset_count()) == nullptr);
}

namespace {
int g_callbacks = 0;
void count(const fsorf_check*, const char*, void* user) {
  ++g_callbacks;
  *static_cast<int*>(user) += 1;
}
}  // namespace

TEST_CASE("C API: validation report with the negative control") {
  fsorf_validate_options o;
  fsorf_validate_options_init(&o);
  const int only[] = {0};
  o.only = only;
  o.n_only = 1;
  int seen = 0;
  o.on_check = count;
  o.user = &seen;
  fsorf_report* rep = nullptr;
  REQUIRE(fsorf_validate(&o, &rep) == FSORF_OK);
  CHECK(fsorf_report_count(rep) == 1);
  CHECK(fsorf_report_passed(rep) == 1);
  CHECK(seen == 1);
  CHECK(std::string(fsorf_report_line(rep, 0)).rfind("PASS [0]", 0) == 0);
  fsorf_report_free(rep);

  o.corrupt_bk = 1;
  REQUIRE(fsorf_validate(&o, &rep) == FSORF_OK);
  fsorf_check c;
  REQUIRE(fsorf_report_check(rep, 0, &c) == FSORF_OK);
  CHECK(c.passed == 0);
  CHECK(fsorf_report_passed(rep) == 0);
  fsorf_report_free(rep);

  o.mc_samples = 10;
  CHECK(fsorf_validate(&o, &rep) == FSORF_ERR_CONFIG);
}
