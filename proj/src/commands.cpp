#include "ifm/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ifm/analytic_pricers.hpp"
#include "ifm/corr_calib.hpp"
#include "ifm/errors.hpp"
#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/leverage.hpp"
#include "ifm/market_data.hpp"
#include "ifm/mc_engine.hpp"
#include "ifm/simplified.hpp"
#include "io_util.hpp"

namespace ifm {

namespace {

using nlohmann::json;

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

struct Engine {
  DiscountCurve curve;
  CpiVolSurface vols;
  G1ppParams g;
  ShiftFunction shift;
  FactorConfig fc;
};

Engine load_engine(const RunConfig& cfg) {
  Engine e;
  e.curve = load_discounts(cfg.resolve(cfg.discounts));
  e.vols = load_cpi_vols(cfg.resolve(cfg.cpi_vols));
  e.g = G1ppParams::make(PiecewiseConstant::constant(cfg.mean_reversion),
                         load_g1pp_vol(cfg.resolve(cfg.g1pp)));
  e.shift = calibrate_shift(e.g, e.curve);
  e.fc = load_factor_config(cfg.resolve(cfg.factors));
  return e;
}

McConfig mc_config(const RunConfig& cfg, double horizon, const CpiVolSurface& vols) {
  McConfig mc;
  mc.n_paths = cfg.paths;
  mc.seed = cfg.seed;
  mc.substeps = cfg.substeps;
  mc.antithetic = cfg.antithetic;
  mc.workers = cfg.workers;
  std::vector<double> resets;
  for (int i = 0; i < vols.size(); ++i)
    if (vols.tenor(i).reset <= horizon + 1e-9) resets.push_back(vols.tenor(i).reset);
  mc.grid = make_time_grid(horizon, cfg.slice_dt, resets);
  return mc;
}

// The loaded leverage surface must outlive the coefficient that reads it.
struct Model {
  std::unique_ptr<LeverageSurface> lev;
  std::unique_ptr<DiffusionCoeff> coeff;
};

Model make_model(const RunConfig& cfg, const Engine& e) {
  Model m;
  if (cfg.model == "constant") {
    m.coeff =
        std::make_unique<ConstantSigma>(calibrate_sigmas(e.fc.params, e.vols, cfg.sigma_kbar));
  } else if (cfg.model == "simplified") {
    m.coeff = std::make_unique<SimplifiedCoeff>(e.vols, e.fc.params, SimplifiedParams{cfg.eta});
  } else if (cfg.model == "leveraged") {
    m.lev = std::make_unique<LeverageSurface>(load_leverage(cfg.resolve(cfg.leverage)));
    std::vector<double> f0;
    for (int i = 0; i < e.vols.size(); ++i) f0.push_back(e.vols.tenor(i).fwd_cpi);
    m.coeff = std::make_unique<LeverageCoeff>(*m.lev, f0, LeverageCoeff::Mode::bilinear);
  } else {
    throw ValidationError("config: unknown model '" + cfg.model + "'");
  }
  return m;
}

double max_reset(const CpiVolSurface& vols) {
  double h = 0.0;
  for (int i = 0; i < vols.size(); ++i) h = std::max(h, vols.tenor(i).reset);
  return h;
}

// Implied vol with the no-arbitrage band clamped to the vol brackets, for
// turning MC price bands into vol bands.
double implied_vol_clamped(double price, const ZcInstrument& inst, const DiscountCurve& curve,
                           double fwd_cpi) {
  const double df = curve.discount(inst.pay);
  const double strike = inst.strike();
  const double intrinsic =
      inst.notional * df *
      std::max(inst.kind == OptionKind::Cap ? fwd_cpi - strike : strike - fwd_cpi, 0.0);
  const double bound = inst.notional * df * (inst.kind == OptionKind::Cap ? fwd_cpi : strike);
  if (price <= intrinsic) return 1e-6;
  if (price >= bound) return 5.0;
  return implied_vol(price, inst, curve, fwd_cpi);
}

int tenor_index_of(const CpiVolSurface& vols, double reset, const char* what) {
  const int idx = vols.index_of_reset(reset);
  if (idx < 0)
    throw ValidationError(std::string(what) + ": no quoted tenor with reset " +
                          io::format_double(reset));
  return idx;
}

}  // namespace

std::string RunConfig::resolve(const std::string& rel) const {
  std::filesystem::path p(rel);
  if (p.is_absolute() || dir.empty()) return rel;
  return (std::filesystem::path(dir) / p).string();
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) throw ValidationError(path + ": config must be a JSON object");
  RunConfig cfg;
  cfg.dir = std::filesystem::path(path).parent_path().string();
  try {
    cfg.discounts = j.value("discounts", cfg.discounts);
    cfg.cpi_vols = j.value("cpi_vols", cfg.cpi_vols);
    cfg.g1pp = j.value("g1pp", cfg.g1pp);
    cfg.factors = j.value("factors", cfg.factors);
    cfg.history = j.value("history", cfg.history);
    cfg.leverage = j.value("leverage", cfg.leverage);
    cfg.mean_reversion = j.value("a", cfg.mean_reversion);
    cfg.model = j.value("model", cfg.model);
    cfg.eta = j.value("eta", cfg.eta);
    cfg.sigma_kbar = j.value("sigma_kbar", cfg.sigma_kbar);
    cfg.paths = j.value("paths", cfg.paths);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.slice_dt = j.value("slice_dt", cfg.slice_dt);
    cfg.substeps = j.value("substeps", cfg.substeps);
    cfg.antithetic = j.value("antithetic", cfg.antithetic);
    cfg.workers = j.value("workers", cfg.workers);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return cfg;
}

int cmd_calibrate_correlations(const std::string& history_path, int factor_count, double rho,
                               const std::string& out_json, const std::string& out_table,
                               std::uint64_t seed) {
  const HistoricalSeries h = load_history(history_path);
  const CorrelationMatrix corr = market_correlations(h);
  const FactorFit fit = fit_factor_params(corr, factor_count, seed);

  FactorConfig fc;
  fc.params = fit.params;
  fc.rho = RateCorrelations::flat(factor_count, rho);
  save_factor_config(out_json, fc);

  if (!out_table.empty()) {
    auto out = io::open_out(out_table);
    out << "Tj,Tk,market,model\n";
    for (int a = 0; a < corr.size(); ++a)
      for (int b = a + 1; b < corr.size(); ++b)
        out << io::format_double(corr.tenors[static_cast<std::size_t>(a)]) << ','
            << io::format_double(corr.tenors[static_cast<std::size_t>(b)]) << ','
            << io::format_double(corr.at(a, b)) << ','
            << io::format_double(
                   inst_correlation(fit.params, corr.tenors[static_cast<std::size_t>(a)],
                                    corr.tenors[static_cast<std::size_t>(b)], 0.0))
            << '\n';
  }

  const PcaResult diag = pca(h);
  std::cout << "J* = " << io::format_double(fit.objective) << '\n';
  std::cout << "explained:";
  for (double c : diag.cumulative) std::cout << ' ' << io::format_double(c);
  std::cout << '\n';
  if (!fit.converged) {
    std::cerr << "warning: optimizer hit the iteration cap on every start\n";
    return 3;
  }
  return 0;
}

int cmd_calibrate_sigmas(const RunConfig& cfg, double kbar, const std::string& out_csv) {
  const CpiVolSurface vols = load_cpi_vols(cfg.resolve(cfg.cpi_vols));
  const FactorConfig fc = load_factor_config(cfg.resolve(cfg.factors));
  const std::vector<double> sig = calibrate_sigmas(fc.params, vols, kbar);
  auto out = io::open_out(out_csv);
  out << "Ti,Kbar,sigma\n";
  for (int i = 0; i < vols.size(); ++i)
    out << io::format_double(vols.tenor(i).reset) << ',' << io::format_double(kbar) << ','
        << io::format_double(sig[static_cast<std::size_t>(i)]) << '\n';
  return 0;
}

int cmd_calibrate_leverage(const RunConfig& cfg, const std::string& out_csv,
                           const std::string& out_report) {
  const Engine e = load_engine(cfg);
  const McConfig mc = mc_config(cfg, max_reset(e.vols), e.vols);
  LeverageReport rep;
  const LeverageSurface surface = calibrate_leverage(e.curve, e.vols, e.fc.params, e.fc.rho, e.g,
                                                     e.shift, mc, LeverageGrid{}, 1.0, &rep);
  save_leverage(out_csv, surface);

  auto out = io::open_out(out_report);
  out << "t,bracket_floors,negative_floors,gradient_fallbacks\n";
  for (const auto& s : rep.slices)
    out << io::format_double(s.t) << ',' << s.bracket_floors << ',' << s.negative_floors << ','
        << s.gradient_fallbacks << '\n';
  std::cout << "leverage slices: " << surface.slice_count()
            << ", bracket floors: " << rep.total(&LeverageReport::Slice::bracket_floors)
            << ", negative floors: " << rep.total(&LeverageReport::Slice::negative_floors)
            << ", gradient fallbacks: " << rep.total(&LeverageReport::Slice::gradient_fallbacks)
            << '\n';
  return 0;
}

int cmd_price(const RunConfig& cfg, const std::string& instrument_json,
              const std::string& out_csv) {
  const json j = parse_json_file(instrument_json);
  const Engine e = load_engine(cfg);

  std::string kind_s, method;
  double notional = 1.0, kbar = 0.0, ti = 0.0;
  std::optional<double> tj, tp, ref_index;
  try {
    kind_s = j.at("kind").get<std::string>();
    method = j.value("method", std::string("analytic"));
    notional = j.value("notional", 1.0);
    kbar = j.at("kbar").get<double>();
    ti = j.at("Ti").get<double>();
    if (j.contains("Tj")) tj = j.at("Tj").get<double>();
    if (j.contains("Tp")) tp = j.at("Tp").get<double>();
    if (j.contains("ref_index")) ref_index = j.at("ref_index").get<double>();
  } catch (const json::exception& ex) {
    throw ValidationError(instrument_json + ": " + ex.what());
  }
  if (method != "analytic" && method != "mc")
    throw ValidationError("instrument: method must be 'analytic' or 'mc'");

  const bool is_yoy = kind_s.rfind("yoy_", 0) == 0;
  const std::string payoff = is_yoy ? kind_s.substr(4) : kind_s.substr(3);
  OptionKind kind;
  if (payoff == "swap") kind = OptionKind::Swap;
  else if (payoff == "cap") kind = OptionKind::Cap;
  else if (payoff == "floor") kind = OptionKind::Floor;
  else throw ValidationError("instrument: unknown kind '" + kind_s + "'");
  if (!is_yoy && kind_s.rfind("zc_", 0) != 0)
    throw ValidationError("instrument: unknown kind '" + kind_s + "'");

  PriceQuote quote{};
  double strike = 0.0;
  double pay = 0.0;
  if (!is_yoy) {
    const int idx = tenor_index_of(e.vols, ti, "instrument");
    const auto& ten = e.vols.tenor(idx);
    pay = tp.value_or(ten.pay);
    const ZcInstrument inst{kind, notional, kbar, ref_index.value_or(ten.fwd_cpi), ten.reset,
                            pay};
    strike = inst.strike();
    if (method == "analytic") {
      quote = kind == OptionKind::Swap
                  ? zc_swap(inst, e.curve, ten.fwd_cpi)
                  : zc_cap_floor(inst, e.curve, ten.fwd_cpi, ten.vol_at(strike));
    } else {
      const Model m = make_model(cfg, e);
      Simulator sim(mc_config(cfg, ten.reset, e.vols), e.g, e.shift, e.fc.params, e.fc.rho,
                    e.vols);
      const McRun run = simulate_to_resets(sim, *m.coeff);
      quote = price_zc_option_mc(inst, idx, run, e.g, e.shift);
    }
  } else {
    if (!tj) throw ValidationError("instrument: yoy needs Tj");
    const int idx_i = tenor_index_of(e.vols, ti, "instrument");
    const int idx_j = tenor_index_of(e.vols, *tj, "instrument");
    const auto& ten_i = e.vols.tenor(idx_i);
    const auto& ten_j = e.vols.tenor(idx_j);
    pay = tp.value_or(ten_j.pay);
    const YoyInstrument inst{kind, notional, kbar, ten_i.reset, ten_j.reset, pay};
    strike = inst.strike();
    if (method == "analytic") {
      const std::vector<double> sig = calibrate_sigmas(e.fc.params, e.vols, cfg.sigma_kbar);
      const YoyUnderlier ui{ten_i.reset, ten_i.pay, ten_i.fwd_cpi,
                            sig[static_cast<std::size_t>(idx_i)]};
      const YoyUnderlier uj{ten_j.reset, ten_j.pay, ten_j.fwd_cpi,
                            sig[static_cast<std::size_t>(idx_j)]};
      quote = kind == OptionKind::Swap
                  ? yoy_swap(inst, e.curve, ui, uj, e.fc.params, e.fc.rho, e.g)
                  : yoy_cap_floor(inst, e.curve, ui, uj, e.fc.params, e.fc.rho, e.g);
    } else {
      const Model m = make_model(cfg, e);
      Simulator sim(mc_config(cfg, ten_j.reset, e.vols), e.g, e.shift, e.fc.params, e.fc.rho,
                    e.vols);
      const McRun run = simulate_to_resets(sim, *m.coeff);
      quote = price_yoy_option_mc(inst, idx_i, idx_j, run, e.g, e.shift);
    }
  }

  auto out = io::open_out(out_csv);
  out << "kind,Ti,Tj,Tp,K,value,stderr,method\n";
  out << kind_s << ',' << io::format_double(ti) << ','
      << (is_yoy ? io::format_double(*tj) : std::string()) << ',' << io::format_double(pay) << ','
      << io::format_double(strike) << ',' << io::format_double(quote.value) << ','
      << io::format_double(quote.std_error) << ',' << method << '\n';
  return 0;
}

int cmd_recover_vols(const RunConfig& cfg, const std::string& out_csv) {
  const Engine e = load_engine(cfg);
  const Model m = make_model(cfg, e);
  Simulator sim(mc_config(cfg, max_reset(e.vols), e.vols), e.g, e.shift, e.fc.params, e.fc.rho,
                e.vols);
  const McRun run = simulate_to_resets(sim, *m.coeff);

  auto out = io::open_out(out_csv);
  out << "tenor,Kbar,market_vol,mc_vol,mc_vol_lo,mc_vol_hi\n";
  for (int i = 0; i < e.vols.size(); ++i) {
    const auto& ten = e.vols.tenor(i);
    for (std::size_t q = 0; q < ten.kbars.size(); ++q) {
      const double kbar = ten.kbars[q];
      const OptionKind kind = kbar > 0.0 ? OptionKind::Cap : OptionKind::Floor;
      const ZcInstrument inst{kind, 1.0, kbar, ten.fwd_cpi, ten.reset, ten.pay};
      const PriceQuote pq = price_zc_option_mc(inst, i, run, e.g, e.shift);
      const double mid = implied_vol_clamped(pq.value, inst, e.curve, ten.fwd_cpi);
      const double lo =
          implied_vol_clamped(pq.value - 2.0 * pq.std_error, inst, e.curve, ten.fwd_cpi);
      const double hi =
          implied_vol_clamped(pq.value + 2.0 * pq.std_error, inst, e.curve, ten.fwd_cpi);
      out << io::format_double(ten.reset) << ',' << io::format_double(kbar) << ','
          << io::format_double(ten.vols[q]) << ',' << io::format_double(mid) << ','
          << io::format_double(lo) << ',' << io::format_double(hi) << '\n';
    }
  }
  return 0;
}

int cmd_yoy_compare(const RunConfig& cfg, const std::string& out_csv) {
  const Engine e = load_engine(cfg);
  const int idx_i = tenor_index_of(e.vols, 1.0, "yoy-compare");
  const int idx_j = tenor_index_of(e.vols, 2.0, "yoy-compare");
  const auto& ten_i = e.vols.tenor(idx_i);
  const auto& ten_j = e.vols.tenor(idx_j);
  const double notional = 1000.0;

  const Model m = make_model(cfg, e);
  Simulator sim(mc_config(cfg, ten_j.reset, e.vols), e.g, e.shift, e.fc.params, e.fc.rho, e.vols);
  const McRun run = simulate_to_resets(sim, *m.coeff);

  const std::vector<double> sigma_kbars{-0.02, -0.01, 0.0, 0.01, 0.02, 0.03};
  std::vector<std::vector<double>> sigs;
  for (double sk : sigma_kbars) sigs.push_back(calibrate_sigmas(e.fc.params, e.vols, sk));

  auto out = io::open_out(out_csv);
  out << "Kbar_y,mc_price,mc_se";
  for (double sk : sigma_kbars) out << ",analytic_" << io::format_double(sk);
  out << ",analytic_spread\n";

  for (int s = 0; s <= 8; ++s) {
    const double kbar_y = -0.01 + 0.005 * s;
    const YoyInstrument inst{OptionKind::Cap, notional, kbar_y, ten_i.reset, ten_j.reset,
                             ten_j.pay};
    const PriceQuote mc = price_yoy_option_mc(inst, idx_i, idx_j, run, e.g, e.shift);
    out << io::format_double(kbar_y) << ',' << io::format_double(mc.value) << ','
        << io::format_double(mc.std_error);
    double lo = 0.0, hi = 0.0;
    for (std::size_t c = 0; c < sigma_kbars.size(); ++c) {
      const YoyUnderlier ui{ten_i.reset, ten_i.pay, ten_i.fwd_cpi,
                            sigs[c][static_cast<std::size_t>(idx_i)]};
      const YoyUnderlier uj{ten_j.reset, ten_j.pay, ten_j.fwd_cpi,
                            sigs[c][static_cast<std::size_t>(idx_j)]};
      const double v = yoy_cap_floor(inst, e.curve, ui, uj, e.fc.params, e.fc.rho, e.g).value;
      lo = c == 0 ? v : std::min(lo, v);
      hi = c == 0 ? v : std::max(hi, v);
      out << ',' << io::format_double(v);
    }
    out << ',' << io::format_double(hi - lo) << '\n';
  }
  return 0;
}

}  // namespace ifm
