// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "milac/sim/emit.hpp"
#include "milac/sim/sweeps.hpp"
#include "milac/sim/verify.hpp"
#include "oracles.hpp"

using namespace milac;
using namespace milac::sim;

namespace {

ExperimentConfig small_nmse_config() {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::nmse_vs_snr);
  config.sizes = {{4, 4}};
  config.snr_db = {0.0, 10.0};
  config.trials = 300;
  config.base_seed = 42;
  config.workers = 2;
  return config;
}

}  // namespace

TEST_CASE("config: defaults, file parsing and overrides") {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::nmse_vs_snr);
  CHECK(config.snr_db.size() == 9);  // -10..30 dB step 5
  CHECK(config.eps_tx == 0.8);
  CHECK(config.trials == 10000);
  config.validate();

  const std::string path =
      (std::filesystem::temp_directory_path() / "milac_test_config.txt").string();
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "trials = 123\n"
        << "snr = 0, 5\n"
        << "sizes = 2x3\n"
        << "schemes = milac-ls\n"
        << "eps_tx = 0.5\n";
  }
  apply_config_file(config, path);
  CHECK(config.trials == 123);
  CHECK(config.snr_db == std::vector<double>{0.0, 5.0});
  REQUIRE(config.sizes.size() == 1);
  CHECK(config.sizes[0].first == 2);
  CHECK(config.sizes[0].second == 3);
  CHECK(config.schemes == std::vector<Scheme>{Scheme::milac_ls});
  CHECK(config.eps_tx == 0.5);

  // flags win by being applied after the file
  apply_key_value(config, "trials", "7");
  CHECK(config.trials == 7);
  std::remove(path.c_str());
}

TEST_CASE("config: errors name the offending field") {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::nmse_vs_snr);
  CHECK_THROWS_AS(apply_key_value(config, "trials", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(config, "unknown_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(config, "sizes", "16"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(config, "schemes", "bogus"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(config, "format", "pdf"), ConfigError);

  try {
    config.trials = 0;
    config.validate();
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.field() == "trials");
  }

  config = ExperimentConfig::defaults_for(SweepKind::nmse_vs_snr);
  config.eps_rx = 1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("seed derivation distinguishes trials and streams") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(channel_seed(9, 4) != noise_seed(9, 4));
}

TEST_CASE("nmse sweep: deterministic rows, scheme-independent draws") {
  const ExperimentConfig config = small_nmse_config();
  const auto rows_a = run_nmse_sweep(config);
  const auto rows_b = run_nmse_sweep(config);
  REQUIRE(rows_a.size() == rows_b.size());
  REQUIRE(rows_a.size() == 2 * 4);  // 2 SNR points x 4 schemes
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    CHECK(rows_a[i].value == rows_b[i].value);
    CHECK(rows_a[i].std_error == rows_b[i].std_error);
    CHECK(rows_a[i].trials == config.trials);
    CHECK(rows_a[i].std_error >= 0.0);
  }

  // running milac-ls alone reproduces its rows from the joint run
  ExperimentConfig solo = config;
  solo.schemes = {Scheme::milac_ls};
  const auto solo_rows = run_nmse_sweep(solo);
  REQUIRE(solo_rows.size() == 2);
  for (const auto& row : solo_rows) {
    bool found = false;
    for (const auto& joint : rows_a)
      if (joint.scheme == row.scheme && joint.snr_db == row.snr_db) {
        CHECK(joint.value == row.value);
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("nmse sweep: worker count changes results only within rounding") {
  ExperimentConfig config = small_nmse_config();
  config.schemes = {Scheme::milac_ls};
  config.workers = 1;
  const auto serial = run_nmse_sweep(config);
  config.workers = 3;
  const auto parallel = run_nmse_sweep(config);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(serial[i].value ==
          doctest::Approx(parallel[i].value).epsilon(1e-12));
}

TEST_CASE("nmse sweep hits the closed form (milac-ls, N = 16, 10 dB)") {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::nmse_vs_snr);
  config.sizes = {{16, 16}};
  config.snr_db = {10.0};
  config.trials = 10000;
  config.schemes = {Scheme::milac_ls};
  config.base_seed = 7;
  const auto rows = run_nmse_sweep(config);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0].value - 1.6) / 1.6 < 0.03);
}

TEST_CASE("nmse sweep: paired schemes agree within Monte Carlo error") {
  ExperimentConfig config = small_nmse_config();
  config.sizes = {{8, 8}};
  config.trials = 2000;
  config.schemes = {Scheme::milac_ls, Scheme::digital_ls, Scheme::milac_mmse,
                    Scheme::digital_mmse};
  const auto rows = run_nmse_sweep(config);
  for (double snr : config.snr_db) {
    double milac_ls = 0, digital_ls = 0, milac_mmse = 0, digital_mmse = 0,
           se = 0;
    for (const auto& r : rows) {
      if (r.snr_db != snr) continue;
      se = std::max(se, r.std_error);
      if (r.scheme == "milac-ls") milac_ls = r.value;
      if (r.scheme == "digital-ls") digital_ls = r.value;
      if (r.scheme == "milac-mmse") milac_mmse = r.value;
      if (r.scheme == "digital-mmse") digital_mmse = r.value;
    }
    CHECK(std::abs(milac_ls - digital_ls) <= 2.0 * se);
    // same estimator and draws; only gemm-vs-gemv rounding separates them
    CHECK(milac_mmse == doctest::Approx(digital_mmse).epsilon(1e-12));
    CHECK(milac_mmse <= milac_ls + 2.0 * se);
  }
}

TEST_CASE("complexity sweep: formula rows with zero-cost milac schemes") {
  ExperimentConfig config =
      ExperimentConfig::defaults_for(SweepKind::complexity_vs_nrx);
  const auto rows = run_complexity_sweep(config);
  // 8 grid points x 4 schemes x 2 metrics
  CHECK(rows.size() == 8 * 4 * 2);
  for (const auto& r : rows) {
    const Scheme scheme = parse_scheme(r.scheme);
    if (r.metric == "online_real_ops")
      CHECK(r.value ==
            static_cast<double>(complexity_report(r.n_tx, r.n_rx, r.n_tx,
                                                  scheme)));
    if (is_milac(scheme)) CHECK(r.value == 0.0);
  }
  bool found_peak = false;
  for (const auto& r : rows)
    if (r.scheme == "digital-mmse" && r.n_rx == 2048 && r.n_tx == 64 &&
        r.metric == "online_real_ops") {
      CHECK(r.value == 2147483648.0);
      found_peak = true;
    }
  CHECK(found_peak);
}

TEST_CASE("papr report: unit milac PAPR, fluctuating digital MMSE") {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::papr);
  config.sizes = {{16, 16}};
  config.snr_db = {0.0};
  const auto rows = run_papr_report(config);
  bool saw_identity = false;
  for (const auto& r : rows) {
    if (r.scheme == "milac-ls" || r.scheme == "milac-mmse")
      CHECK(r.value == 1.0);
    if (r.scheme == "digital-ls" && r.metric == "papr_max")
      CHECK(std::abs(r.value - 1.0) < 1e-12);
    if (r.scheme == "digital-mmse" && r.metric == "papr_max")
      CHECK(r.value > 1.0);
    if (r.scheme == "digital-ls-identity" && r.metric == "papr_max") {
      CHECK(r.value == doctest::Approx(16.0));
      saw_identity = true;
    }
  }
  CHECK(saw_identity);
}

TEST_CASE("CSV: exact header, full precision, byte-identical reruns") {
  std::vector<ResultRow> rows{
      {"milac-ls", 4, 4, 0.0, "nmse", 0.1234567890123456789, 10, 0.25},
      {"digital-ls", 4, 4, 5.0, "nmse", 2147483648.0, 10, 0.0},
      {"milac-mmse", 4, 4, 5.0, "nmse", 0.5, 10, 0.125},
  };
  const std::string csv = to_csv(rows);
  CHECK(csv.rfind("scheme,n_tx,n_rx,snr_db,metric,value,trials,stderr\n", 0) ==
        0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find("milac-ls,4,4,0,nmse,0.12345678901234568,10,0.25\n") !=
        std::string::npos);
  CHECK(csv.find("digital-ls,4,4,5,nmse,2147483648,10,0\n") !=
        std::string::npos);
  CHECK(to_csv(rows) == csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK_THROWS_AS(to_csv({}), std::invalid_argument);

  // 17 significant digits round-trip through text
  const double parsed = std::stod(csv.substr(csv.find("0.12345678")));
  CHECK(parsed == rows[0].value);
}

TEST_CASE("sweep output is byte-identical across runs") {
  const ExperimentConfig config = small_nmse_config();
  CHECK(to_csv(run_nmse_sweep(config)) == to_csv(run_nmse_sweep(config)));
}

TEST_CASE("SVG: one polyline per series, self-contained document") {
  ExperimentConfig config = small_nmse_config();
  config.schemes = {Scheme::milac_ls, Scheme::milac_mmse};
  const auto rows = run_nmse_sweep(config);
  const std::string svg = to_svg(rows, "nmse", PlotAxis::snr_db, "nmse_sweep");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    pos += 9;
  }
  CHECK(polylines == 2);
  CHECK(svg.find("href") == std::string::npos);  // no external assets
  CHECK_THROWS_AS(to_svg(rows, "missing-metric", PlotAxis::snr_db, "x"),
                  std::invalid_argument);

  // complexity plot groups by (scheme, n_tx) so n_rx can be the x axis
  ExperimentConfig cplx =
      ExperimentConfig::defaults_for(SweepKind::complexity_vs_nrx);
  const std::string cplx_svg =
      to_svg(run_complexity_sweep(cplx), "online_real_ops", PlotAxis::n_rx,
             "complexity_sweep");
  std::size_t cplx_lines = 0;
  pos = 0;
  while ((pos = cplx_svg.find("<polyline", pos)) != std::string::npos) {
    ++cplx_lines;
    pos += 9;
  }
  CHECK(cplx_lines == 8);  // 4 schemes x n_tx in {16, 64}
  CHECK(cplx_svg.find("(= 0)") != std::string::npos);  // milac series marked
}

TEST_CASE("emit_results writes the requested files") {
  const auto dir = std::filesystem::temp_directory_path() / "milac_emit_test";
  std::filesystem::remove_all(dir);
  const ExperimentConfig config = small_nmse_config();
  const auto rows = run_nmse_sweep(config);
  const auto written = emit_results(rows, dir.string(), OutputFormat::both,
                                    "nmse_sweep", "nmse", PlotAxis::snr_db);
  REQUIRE(written.size() == 2);
  for (const auto& path : written) CHECK(std::filesystem::exists(path));
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify: clean build passes, injected faults are caught") {
  ExperimentConfig config = ExperimentConfig::defaults_for(SweepKind::verify);
  config.trials = 4000;
  const auto clean = run_verify(config);
  for (const auto& check : clean.checks) {
    CAPTURE(check.name);
    CAPTURE(check.observed);
    CHECK(check.pass);
  }
  CHECK(clean.all_pass());

  const auto bad_admittance = run_verify(config, FaultInjection::admittance);
  CHECK_FALSE(bad_admittance.all_pass());
  bool round_trip_failed = false;
  for (const auto& check : bad_admittance.checks)
    if (check.name == "admittance-round-trip" && !check.pass)
      round_trip_failed = true;
  CHECK(round_trip_failed);

  const auto bad_kkt = run_verify(config, FaultInjection::kkt);
  CHECK_FALSE(bad_kkt.all_pass());
  bool kkt_failed = false;
  for (const auto& check : bad_kkt.checks)
    if (check.name == "power-allocation-kkt" && !check.pass) kkt_failed = true;
  CHECK(kkt_failed);

  CHECK(parse_fault("none") == FaultInjection::none);
  CHECK_THROWS_AS(parse_fault("bogus"), ConfigError);
}
