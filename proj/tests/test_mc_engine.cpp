#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ifm/errors.hpp"
#include "ifm/mc_engine.hpp"
#include "support/fixtures.hpp"

using namespace ifm;

namespace {

McConfig small_config(std::size_t paths, double horizon, const CpiVolSurface& vols,
                      int workers = 1) {
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = 99;
  cfg.substeps = 2;
  cfg.workers = workers;
  std::vector<double> resets;
  for (int i = 0; i < vols.size(); ++i)
    if (vols.tenor(i).reset <= horizon + 1e-9) resets.push_back(vols.tenor(i).reset);
  cfg.grid = make_time_grid(horizon, 0.25, resets);
  return cfg;
}

struct Blowup final : DiffusionCoeff {
  double value(int, double, double) const override { return 1e200; }
};

}  // namespace

TEST_SUITE_BEGIN("mc_engine");

TEST_CASE("time grid merges regular slices with mandatory times") {
  const std::vector<double> g = make_time_grid(1.0, 0.25, {0.3, 1.0});
  REQUIRE(g.size() == 5);  // 0.25, 0.3, 0.5, 0.75, 1.0
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.3));
  CHECK(g.back() == doctest::Approx(1.0));
  // duplicates collapse
  const std::vector<double> g2 = make_time_grid(1.0, 0.5, {0.5, 1.0});
  CHECK(g2.size() == 2);
  CHECK_THROWS_AS(make_time_grid(1.0, 0.25, {1.5}), ValidationError);
  CHECK_THROWS_AS(make_time_grid(1.0, 0.25, {0.0}), ValidationError);
}

TEST_CASE("correlation factorization") {
  const FactorCholesky c1 = build_correlation(RateCorrelations::flat(1, 0.0));
  CHECK(c1.entry(0, 0) == doctest::Approx(1.0));
  CHECK(c1.entry(1, 0) == doctest::Approx(0.0));
  CHECK(c1.entry(1, 1) == doctest::Approx(1.0));

  const RateCorrelations rc = RateCorrelations::flat(2, -0.5);
  const FactorCholesky c = build_correlation(rc);
  // reconstruct L L^T and compare with the block matrix
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += c.entry(r, k) * c.entry(s, k);
      double want = r == s ? 1.0 : 0.0;
      if (r == 0 && s > 0) want = rc.rho[s - 1];
      if (s == 0 && r > 0) want = rc.rho[r - 1];
      CHECK(acc == doctest::Approx(want).epsilon(1e-12));
    }

  RateCorrelations bad;
  bad.rho = {0.9, 0.9};
  CHECK_THROWS_AS(build_correlation(bad), ValidationError);
}

TEST_CASE("config validation") {
  McConfig cfg;
  cfg.grid = {0.5, 1.0};
  cfg.n_paths = 3;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);  // odd antithetic count
  cfg.n_paths = 4;
  cfg.grid = {0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.grid = {-0.5, 1.0};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("antithetic pairing kills the odd moments of x") {
  const CpiVolSurface vols = fixtures::flat_vols({1.0}, {124.43}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, fixtures::table_curve());
  Simulator sim(small_config(512, 1.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const ConstantSigma coeff({0.02});
  sim.advance_slice(coeff);
  const Ensemble& e = sim.state();
  const double sum = std::accumulate(e.x.begin(), e.x.end(), 0.0);
  CHECK(std::fabs(sum) < 1e-12);
}

TEST_CASE("pathwise discount factors integrate to bond prices") {
  const DiscountCurve curve = fixtures::table_curve();
  const CpiVolSurface vols = fixtures::flat_vols({1.0, 5.0}, {124.43, 136.30}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, curve);
  Simulator sim(small_config(4000, 5.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const ConstantSigma coeff({0.02, 0.02});
  const McRun run = simulate_to_resets(sim, coeff);

  for (int tenor : {0, 1}) {
    const auto& cap = run.at_reset(tenor);
    std::vector<double> disc(run.n_paths);
    for (std::size_t pth = 0; pth < run.n_paths; ++pth) disc[pth] = std::exp(cap.log_d[pth]);
    const PriceQuote q = reduce_payoffs(disc, run.valid, run.antithetic);
    const double target = curve.discount(cap.reset);
    CHECK(std::fabs(q.value - target) <= 3.0 * q.std_error);
    CHECK(q.std_error < 2e-3);
  }
}

TEST_CASE("constant sigma mc reprices the analytic cap") {
  const DiscountCurve curve = fixtures::table_curve();
  const CpiVolSurface vols = fixtures::flat_vols({1.0}, {124.43}, 0.0244);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, curve);
  Simulator sim(small_config(8000, 1.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const ConstantSigma coeff({0.0244});
  const McRun run = simulate_to_resets(sim, coeff);

  const ZcInstrument inst{OptionKind::Cap, 1.0, 0.0, 124.43, 1.0, 1.0};
  const PriceQuote mc = price_zc_option_mc(inst, 0, run, g, shift);
  const double target = zc_cap_floor(inst, curve, 124.43, 0.0244).value;
  CHECK(std::fabs(mc.value - target) <= 3.0 * mc.std_error);
  CHECK(mc.std_error > 0.0);
}

TEST_CASE("forwards freeze after their reset") {
  const CpiVolSurface vols = fixtures::flat_vols({1.0, 2.0}, {124.43, 127.26}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, fixtures::table_curve());
  Simulator sim(small_config(64, 2.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const ConstantSigma coeff({0.02, 0.02});
  sim.advance_to(1.0, coeff);
  const std::vector<double> at_reset = sim.state().log_f;
  sim.advance_to(2.0, coeff);
  for (std::size_t pth = 0; pth < 64; ++pth)
    CHECK(sim.state().log_f_at(pth, 0) == at_reset[pth * 2]);
}

TEST_CASE("results are identical across worker counts") {
  const CpiVolSurface vols = fixtures::flat_vols({1.0}, {124.43}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, fixtures::table_curve());
  std::vector<std::vector<double>> states;
  for (int workers : {1, 4, 8}) {
    Simulator sim(small_config(256, 1.0, vols, workers), g, shift, fixtures::p2(),
                  RateCorrelations::flat(2, -0.5), vols);
    const ConstantSigma coeff({0.02});
    const McRun run = simulate_to_resets(sim, coeff);
    states.push_back(run.at_reset(0).log_f);
  }
  CHECK(states[0] == states[1]);
  CHECK(states[0] == states[2]);
}

TEST_CASE("invalid paths trip the health budget") {
  const CpiVolSurface vols = fixtures::flat_vols({1.0}, {124.43}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, fixtures::table_curve());
  Simulator sim(small_config(64, 1.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const Blowup coeff;
  CHECK_THROWS_AS(simulate_to_resets(sim, coeff), NumericalError);
}

TEST_CASE("payoff reduction") {
  // plain: mean of the valid entries, SE = s / sqrt(n)
  const std::vector<double> pay{1.0, 3.0, 100.0, 5.0};
  const std::vector<std::uint8_t> valid{1, 1, 0, 1};
  const PriceQuote q = reduce_payoffs(pay, valid, false);
  CHECK(q.value == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(q.std_error == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

  // antithetic: pairs average first; a pair is valid only when both legs are
  const std::vector<double> pay2{1.0, 3.0, 10.0, 20.0, 7.0, 9.0};
  const std::vector<std::uint8_t> valid2{1, 1, 1, 0, 1, 1};
  const PriceQuote q2 = reduce_payoffs(pay2, valid2, true);
  CHECK(q2.value == doctest::Approx(5.0).epsilon(1e-15));

  CHECK_THROWS_AS(reduce_payoffs({1.0}, {1}, false), NumericalError);
}

TEST_CASE("capture lookup validates the tenor") {
  const CpiVolSurface vols = fixtures::flat_vols({1.0, 5.0}, {124.43, 136.30}, 0.02);
  const G1ppParams g = fixtures::table_g1pp();
  const ShiftFunction shift = calibrate_shift(g, fixtures::table_curve());
  // the 5y tenor sits beyond the 1y horizon: simulation is fine, but there is
  // no capture to price against
  Simulator sim(small_config(64, 1.0, vols), g, shift, FactorParams::one(),
                RateCorrelations::flat(1, -0.5), vols);
  const ConstantSigma coeff({0.02, 0.02});
  const McRun run = simulate_to_resets(sim, coeff);
  CHECK(run.at_reset(0).present());
  CHECK_THROWS_AS(run.at_reset(1), ValidationError);

  // a grid that skips over a covered reset is rejected up front
  McConfig gap = small_config(64, 1.0, vols);
  gap.grid = {0.4, 1.2};
  CHECK_THROWS_AS(Simulator(gap, g, shift, FactorParams::one(),
                            RateCorrelations::flat(1, -0.5), vols),
                  ValidationError);
}

TEST_SUITE_END();
