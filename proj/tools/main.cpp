// ifm — inflation-market model toolkit.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage/data error,
// 3 calibration finished without meeting its convergence test.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ifm/commands.hpp"
#include "ifm/errors.hpp"

namespace {

struct GlobalOpts {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  double slice_dt = 0.0;
  int substeps = 0;
  int antithetic = -1;
  int workers = 0;
};

// Config-file values lose to explicit flags.
ifm::RunConfig effective_config(const GlobalOpts& go, const CLI::App& cmd) {
  ifm::RunConfig cfg;
  if (!go.config.empty()) cfg = ifm::load_run_config(go.config);
  if (cmd.count("--seed")) cfg.seed = go.seed;
  if (cmd.count("--paths")) cfg.paths = go.paths;
  if (cmd.count("--slice-dt")) cfg.slice_dt = go.slice_dt;
  if (cmd.count("--substeps")) cfg.substeps = go.substeps;
  if (cmd.count("--antithetic")) cfg.antithetic = go.antithetic != 0;
  if (cmd.count("--workers")) cfg.workers = go.workers;
  return cfg;
}

void add_overrides(CLI::App* cmd, GlobalOpts& go) {
  cmd->add_option("--config", go.config, "run configuration JSON");
  cmd->add_option("--seed", go.seed, "RNG seed");
  cmd->add_option("--paths", go.paths, "MC path count");
  cmd->add_option("--slice-dt", go.slice_dt, "slice width in years");
  cmd->add_option("--substeps", go.substeps, "substeps per slice");
  cmd->add_option("--antithetic", go.antithetic, "1 = antithetic pairs, 0 = plain");
  cmd->add_option("--workers", go.workers, "worker thread count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inflation-market model calibration and pricing"};
  app.require_subcommand(1);

  GlobalOpts go;

  auto* corr = app.add_subcommand("calibrate-correlations",
                                  "fit factor loadings to historical correlations");
  std::string corr_history, corr_out = "factors.json", corr_table;
  int corr_m = 2;
  double corr_rho = -0.5;
  std::uint64_t corr_seed = 20240901ull;
  corr->add_option("--history", corr_history, "history CSV")->required();
  corr->add_option("-M,--factors", corr_m, "factor count")->check(CLI::Range(2, 3));
  corr->add_option("--rho", corr_rho, "rate-inflation correlation per factor");
  corr->add_option("--out", corr_out, "output factors JSON");
  corr->add_option("--table", corr_table, "model-vs-market correlation CSV");
  corr->add_option("--seed", corr_seed, "optimizer start seed");

  auto* sig = app.add_subcommand("calibrate-sigmas", "per-tenor volatility scales");
  double sig_kbar = 0.0;
  std::string sig_out = "sigmas.csv";
  sig->add_option("--kbar", sig_kbar, "smile moneyness of the quotes used");
  sig->add_option("--out", sig_out, "output CSV");
  add_overrides(sig, go);

  auto* lev = app.add_subcommand("calibrate-leverage", "bootstrap the leverage surface");
  std::string lev_out = "leverage.csv", lev_report = "leverage_report.csv";
  lev->add_option("--out", lev_out, "output leverage CSV");
  lev->add_option("--report", lev_report, "warning-counter CSV");
  add_overrides(lev, go);

  auto* price = app.add_subcommand("price", "price one instrument");
  std::string price_inst, price_out = "price.csv";
  price->add_option("--instrument", price_inst, "instrument JSON")->required();
  price->add_option("--out", price_out, "output CSV");
  add_overrides(price, go);

  auto* rec = app.add_subcommand("recover-vols", "MC repricing of the quoted smile grid");
  std::string rec_out = "recovered_vols.csv";
  rec->add_option("--out", rec_out, "output CSV");
  add_overrides(rec, go);

  auto* yoy = app.add_subcommand("yoy-compare", "1y-2y YoY caps: MC vs analytic");
  std::string yoy_out = "yoy_compare.csv";
  yoy->add_option("--out", yoy_out, "output CSV");
  add_overrides(yoy, go);

  try {
    app.parse(argc, argv);

    if (corr->parsed())
      return ifm::cmd_calibrate_correlations(corr_history, corr_m, corr_rho, corr_out, corr_table,
                                             corr_seed);
    if (sig->parsed()) return ifm::cmd_calibrate_sigmas(effective_config(go, *sig), sig_kbar,
                                                        sig_out);
    if (lev->parsed())
      return ifm::cmd_calibrate_leverage(effective_config(go, *lev), lev_out, lev_report);
    if (price->parsed()) return ifm::cmd_price(effective_config(go, *price), price_inst,
                                               price_out);
    if (rec->parsed()) return ifm::cmd_recover_vols(effective_config(go, *rec), rec_out);
    if (yoy->parsed()) return ifm::cmd_yoy_compare(effective_config(go, *yoy), yoy_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ifm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ifm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
