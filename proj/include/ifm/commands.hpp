#pragma once

#include <cstdint>
#include <string>

namespace ifm {

// Parsed run configuration; relative paths resolve against the config file's
// directory.
struct RunConfig {
  std::string dir;
  std::string discounts = "discounts.csv";
  std::string cpi_vols = "cpi_vols.csv";
  std::string g1pp = "g1pp.csv";
  std::string factors = "factors.json";
  std::string history = "history.csv";
  std::string leverage = "leverage.csv";
  double mean_reversion = 0.02;
  std::string model = "leveraged";  // constant | leveraged | simplified
  double eta = 10.0;
  double sigma_kbar = 0.0;  // smile moneyness of the constant/analytic sigmas
  std::size_t paths = 2000;
  std::uint64_t seed = 1;
  double slice_dt = 0.25;
  int substeps = 3;
  bool antithetic = true;
  int workers = 1;

  std::string resolve(const std::string& rel) const;
};

RunConfig load_run_config(const std::string& path);

// Each command throws ValidationError (exit 2) or NumericalError (exit 1);
// the returned code is 0, or a documented nonzero soft-failure.
int cmd_calibrate_correlations(const std::string& history_path, int factor_count, double rho,
                               const std::string& out_json, const std::string& out_table,
                               std::uint64_t seed);
int cmd_calibrate_sigmas(const RunConfig& cfg, double kbar, const std::string& out_csv);
int cmd_calibrate_leverage(const RunConfig& cfg, const std::string& out_csv,
                           const std::string& out_report);
int cmd_price(const RunConfig& cfg, const std::string& instrument_json,
              const std::string& out_csv);
int cmd_recover_vols(const RunConfig& cfg, const std::string& out_csv);
int cmd_yoy_compare(const RunConfig& cfg, const std::string& out_csv);

}  // namespace ifm
