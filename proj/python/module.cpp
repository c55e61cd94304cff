#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ifm/analytic_pricers.hpp"
#include "ifm/commands.hpp"
#include "ifm/corr_calib.hpp"
#include "ifm/errors.hpp"
#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"
#include "ifm/mc_engine.hpp"

namespace py = pybind11;
using namespace ifm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inflation forward-market model core";

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<NumericalError>(m, "NumericalError");

  // market data
  py::class_<DiscountCurve>(m, "DiscountCurve")
      .def_static("from_pillars", &DiscountCurve::from_pillars, py::arg("times"), py::arg("dfs"))
      .def("discount", &DiscountCurve::discount, py::arg("t"))
      .def("instantaneous_forward", &DiscountCurve::instantaneous_forward, py::arg("t"))
      .def_property_readonly("times", &DiscountCurve::times)
      .def_property_readonly("dfs", &DiscountCurve::dfs);

  py::class_<VolTenor>(m, "VolTenor")
      .def_readonly("reset", &VolTenor::reset)
      .def_readonly("pay", &VolTenor::pay)
      .def_readonly("fwd_cpi", &VolTenor::fwd_cpi)
      .def_readonly("kbars", &VolTenor::kbars)
      .def_readonly("strikes", &VolTenor::strikes)
      .def_readonly("vols", &VolTenor::vols)
      .def("strike_for", &VolTenor::strike_for, py::arg("kbar"))
      .def("vol_at", &VolTenor::vol_at, py::arg("strike"));

  py::class_<CpiVolSurface>(m, "CpiVolSurface")
      .def_property_readonly("size", &CpiVolSurface::size)
      .def("tenor", &CpiVolSurface::tenor, py::arg("i"),
           py::return_value_policy::reference_internal)
      .def("index_of_reset", &CpiVolSurface::index_of_reset, py::arg("reset"))
      .def_property_readonly("ref_index", &CpiVolSurface::ref_index);

  py::class_<HistoricalSeries>(m, "HistoricalSeries")
      .def_property_readonly("rows", &HistoricalSeries::rows)
      .def_property_readonly("cols", &HistoricalSeries::cols)
      .def("at", &HistoricalSeries::at, py::arg("row"), py::arg("col"))
      .def_property_readonly("buckets", &HistoricalSeries::buckets)
      .def_property_readonly("dates", &HistoricalSeries::dates);

  m.def("load_discounts", &load_discounts, py::arg("path"));
  m.def("load_cpi_vols", &load_cpi_vols, py::arg("path"), py::arg("ref_index") = 0.0);
  m.def("load_history", &load_history, py::arg("path"));

  // rates
  py::class_<PiecewiseConstant>(m, "PiecewiseConstant")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("ends"),
           py::arg("values"))
      .def_static("constant", &PiecewiseConstant::constant, py::arg("value"))
      .def("at", &PiecewiseConstant::at, py::arg("t"))
      .def("integral", &PiecewiseConstant::integral, py::arg("t0"), py::arg("t1"));

  py::class_<G1ppParams>(m, "G1ppParams")
      .def_static("make", &G1ppParams::make, py::arg("mean_reversion"), py::arg("vol"))
      .def_readonly("mean_reversion", &G1ppParams::mean_reversion)
      .def_readonly("vol", &G1ppParams::vol);

  m.def("b_factor", &b_factor, py::arg("g"), py::arg("t"), py::arg("T"));
  m.def("calibrate_shift", &calibrate_shift, py::arg("g"), py::arg("curve"));
  m.def("zcb_price", &zcb_price, py::arg("g"), py::arg("shift"), py::arg("t"), py::arg("x"),
        py::arg("T"));
  m.def("load_g1pp_vol", &load_g1pp_vol, py::arg("path"));

  // factor structure
  py::class_<FactorParams>(m, "FactorParams")
      .def_static("one", &FactorParams::one)
      .def_static("two", &FactorParams::two, py::arg("h1"), py::arg("h2"), py::arg("kappa1"))
      .def_static("three", &FactorParams::three, py::arg("h1"), py::arg("h2"), py::arg("h3"),
                  py::arg("h4"), py::arg("kappa1"), py::arg("kappa2"))
      .def_readonly("factor_count", &FactorParams::factor_count)
      .def_readonly("h", &FactorParams::h)
      .def_readonly("kappa", &FactorParams::kappa);

  py::class_<RateCorrelations>(m, "RateCorrelations")
      .def(py::init([](std::vector<double> rho) { return RateCorrelations{std::move(rho)}; }),
           py::arg("rho"))
      .def_static("flat", &RateCorrelations::flat, py::arg("m"), py::arg("rho"))
      .def_readonly("rho", &RateCorrelations::rho);

  m.def("loading", &loading, py::arg("params"), py::arg("alpha"), py::arg("reset"), py::arg("t"));
  m.def("zeta", &zeta, py::arg("params"), py::arg("t_i"), py::arg("t_j"), py::arg("t"));
  m.def("inst_correlation", &inst_correlation, py::arg("params"), py::arg("t_i"), py::arg("t_j"),
        py::arg("t"));
  m.def("integrated_zeta", &integrated_zeta, py::arg("params"), py::arg("t_i"), py::arg("t_j"),
        py::arg("t0"), py::arg("t1"));
  m.def("calibrate_sigmas", &calibrate_sigmas, py::arg("params"), py::arg("surface"),
        py::arg("kbar"));

  py::class_<FactorConfig>(m, "FactorConfig")
      .def_readonly("params", &FactorConfig::params)
      .def_readonly("rho", &FactorConfig::rho);
  m.def("load_factor_config", &load_factor_config, py::arg("path"));

  // correlation calibration
  py::class_<CorrelationMatrix>(m, "CorrelationMatrix")
      .def_readonly("tenors", &CorrelationMatrix::tenors)
      .def_property_readonly("size", &CorrelationMatrix::size)
      .def("at", [](const CorrelationMatrix& c, int i, int j) { return c.at(i, j); },
           py::arg("i"), py::arg("j"));

  py::class_<PcaResult>(m, "PcaResult")
      .def_readonly("eigenvalues", &PcaResult::eigenvalues)
      .def_readonly("eigenvectors", &PcaResult::eigenvectors)
      .def_readonly("cumulative", &PcaResult::cumulative);

  py::class_<FactorFit>(m, "FactorFit")
      .def_readonly("params", &FactorFit::params)
      .def_readonly("objective", &FactorFit::objective)
      .def_readonly("converged", &FactorFit::converged);

  m.def("market_correlations", &market_correlations, py::arg("history"));
  m.def("pca", &pca, py::arg("history"));
  m.def("fit_factor_params", &fit_factor_params, py::arg("target"), py::arg("factor_count"),
        py::arg("seed") = 20240901ull, py::arg("starts") = 8);

  // analytic pricing
  py::enum_<OptionKind>(m, "OptionKind")
      .value("Swap", OptionKind::Swap)
      .value("Cap", OptionKind::Cap)
      .value("Floor", OptionKind::Floor);

  py::class_<ZcInstrument>(m, "ZcInstrument")
      .def(py::init([](OptionKind kind, double notional, double kbar, double ref_index,
                       double reset, double pay) {
             return ZcInstrument{kind, notional, kbar, ref_index, reset, pay};
           }),
           py::arg("kind"), py::arg("notional"), py::arg("kbar"), py::arg("ref_index"),
           py::arg("reset"), py::arg("pay"))
      .def_readwrite("kind", &ZcInstrument::kind)
      .def_readwrite("notional", &ZcInstrument::notional)
      .def_readwrite("kbar", &ZcInstrument::kbar)
      .def_readwrite("ref_index", &ZcInstrument::ref_index)
      .def_readwrite("reset", &ZcInstrument::reset)
      .def_readwrite("pay", &ZcInstrument::pay)
      .def("strike", &ZcInstrument::strike);

  py::class_<YoyInstrument>(m, "YoyInstrument")
      .def(py::init([](OptionKind kind, double notional, double kbar_y, double reset_a,
                       double reset_b, double pay) {
             return YoyInstrument{kind, notional, kbar_y, reset_a, reset_b, pay};
           }),
           py::arg("kind"), py::arg("notional"), py::arg("kbar_y"), py::arg("reset_a"),
           py::arg("reset_b"), py::arg("pay"))
      .def_readwrite("kind", &YoyInstrument::kind)
      .def_readwrite("notional", &YoyInstrument::notional)
      .def_readwrite("kbar_y", &YoyInstrument::kbar_y)
      .def_readwrite("reset_a", &YoyInstrument::reset_a)
      .def_readwrite("reset_b", &YoyInstrument::reset_b)
      .def_readwrite("pay", &YoyInstrument::pay)
      .def("strike", &YoyInstrument::strike);

  py::class_<PriceQuote>(m, "PriceQuote")
      .def_readonly("value", &PriceQuote::value)
      .def_readonly("std_error", &PriceQuote::std_error);

  py::class_<YoyUnderlier>(m, "YoyUnderlier")
      .def(py::init([](double reset, double pay, double fwd_cpi, double sigma) {
             return YoyUnderlier{reset, pay, fwd_cpi, sigma};
           }),
           py::arg("reset"), py::arg("pay"), py::arg("fwd_cpi"), py::arg("sigma"))
      .def_readwrite("reset", &YoyUnderlier::reset)
      .def_readwrite("pay", &YoyUnderlier::pay)
      .def_readwrite("fwd_cpi", &YoyUnderlier::fwd_cpi)
      .def_readwrite("sigma", &YoyUnderlier::sigma);

  m.def("black_option", &black_option, py::arg("kind"), py::arg("fwd"), py::arg("strike"),
        py::arg("total_var"));
  m.def("zc_swap", &zc_swap, py::arg("inst"), py::arg("curve"), py::arg("fwd_cpi"));
  m.def("zc_cap_floor", &zc_cap_floor, py::arg("inst"), py::arg("curve"), py::arg("fwd_cpi"),
        py::arg("sigma"));
  m.def("implied_vol", &implied_vol, py::arg("price"), py::arg("inst"), py::arg("curve"),
        py::arg("fwd_cpi"));
  m.def("yoy_forward_ratio", &yoy_forward_ratio, py::arg("i"), py::arg("j"), py::arg("t_p"),
        py::arg("params"), py::arg("rho"), py::arg("g"));
  m.def("yoy_total_variance", &yoy_total_variance, py::arg("i"), py::arg("j"), py::arg("params"));
  m.def("yoy_swap", &yoy_swap, py::arg("inst"), py::arg("curve"), py::arg("i"), py::arg("j"),
        py::arg("params"), py::arg("rho"), py::arg("g"));
  m.def("yoy_cap_floor", &yoy_cap_floor, py::arg("inst"), py::arg("curve"), py::arg("i"),
        py::arg("j"), py::arg("params"), py::arg("rho"), py::arg("g"));

  // command layer
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("dir", &RunConfig::dir)
      .def_readwrite("discounts", &RunConfig::discounts)
      .def_readwrite("cpi_vols", &RunConfig::cpi_vols)
      .def_readwrite("g1pp", &RunConfig::g1pp)
      .def_readwrite("factors", &RunConfig::factors)
      .def_readwrite("history", &RunConfig::history)
      .def_readwrite("leverage", &RunConfig::leverage)
      .def_readwrite("mean_reversion", &RunConfig::mean_reversion)
      .def_readwrite("model", &RunConfig::model)
      .def_readwrite("eta", &RunConfig::eta)
      .def_readwrite("sigma_kbar", &RunConfig::sigma_kbar)
      .def_readwrite("paths", &RunConfig::paths)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("slice_dt", &RunConfig::slice_dt)
      .def_readwrite("substeps", &RunConfig::substeps)
      .def_readwrite("antithetic", &RunConfig::antithetic)
      .def_readwrite("workers", &RunConfig::workers)
      .def("resolve", &RunConfig::resolve, py::arg("rel"));

  m.def("load_run_config", &load_run_config, py::arg("path"));
  m.def("cmd_calibrate_correlations", &cmd_calibrate_correlations, py::arg("history_path"),
        py::arg("factor_count"), py::arg("rho"), py::arg("out_json"), py::arg("out_table"),
        py::arg("seed") = 20240901ull);
  m.def("cmd_calibrate_sigmas", &cmd_calibrate_sigmas, py::arg("cfg"), py::arg("kbar"),
        py::arg("out_csv"));
  m.def("cmd_calibrate_leverage", &cmd_calibrate_leverage, py::arg("cfg"), py::arg("out_csv"),
        py::arg("out_report"));
  m.def("cmd_price", &cmd_price, py::arg("cfg"), py::arg("instrument_json"), py::arg("out_csv"));
  m.def("cmd_recover_vols", &cmd_recover_vols, py::arg("cfg"), py::arg("out_csv"));
  m.def("cmd_yoy_compare", &cmd_yoy_compare, py::arg("cfg"), py::arg("out_csv"));
}
