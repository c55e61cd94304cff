#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ifm/corr_calib.hpp"
#include "ifm/errors.hpp"
#include "support/fixtures.hpp"

using namespace ifm;

namespace {

// Series whose daily increments are exactly c-correlated: bucket A moves in an
// alternating +/- pattern, bucket B adds an orthogonal four-cycle component.
HistoricalSeries two_bucket_series(double c, double s, int increments) {
  REQUIRE(increments % 4 == 0);
  std::vector<std::string> dates;
  std::vector<double> data;
  double a = 0.0, b = 0.0;
  for (int r = 0; r <= increments; ++r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-01-01", 2000 + r);  // strictly increasing keys
    dates.emplace_back(buf);
    data.push_back(a);
    data.push_back(b);
    const double da = (r % 2 == 0) ? 1.0 : -1.0;
    const double db0 = (r % 4 < 2) ? 1.0 : -1.0;
    a += 0.01 * da;
    b += 0.01 * (c * da + s * db0);
  }
  return HistoricalSeries::from_rows(std::move(dates), {1.0, 5.0}, std::move(data));
}

CorrelationMatrix model_target(const FactorParams& p, const std::vector<double>& tenors) {
  CorrelationMatrix m;
  m.tenors = tenors;
  m.a.assign(tenors.size() * tenors.size(), 0.0);
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      m.at(i, j) = inst_correlation(p, tenors[i], tenors[j], 0.0);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("corr_calib");

TEST_CASE("pearson correlation of constructed increments") {
  // c / sqrt(c^2 + s^2) with c = 0.6, s = 0.8 gives exactly 0.6
  const HistoricalSeries h = two_bucket_series(0.6, 0.8, 80);
  const CorrelationMatrix m = market_correlations(h);
  CHECK(m.size() == 2);
  CHECK(m.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.at(0, 1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(m.at(1, 0) == doctest::Approx(0.6).epsilon(1e-12));
  m.validate();
}

TEST_CASE("market correlation input validation") {
  CHECK_THROWS_AS(market_correlations(two_bucket_series(0.5, 0.5, 40)), ValidationError);
  // constant column has no variance
  HistoricalSeries flat = HistoricalSeries::from_rows(
      [] {
        std::vector<std::string> d;
        for (int r = 0; r < 70; ++r) d.push_back("2000-01-" + std::to_string(100 + r));
        return d;
      }(),
      {1.0, 2.0},
      [] {
        std::vector<double> v;
        for (int r = 0; r < 70; ++r) {
          v.push_back(r % 2 == 0 ? 1.0 : 1.1);
          v.push_back(7.0);
        }
        return v;
      }());
  CHECK_THROWS_AS(market_correlations(flat), ValidationError);
}

TEST_CASE("correlation matrix validation") {
  CorrelationMatrix m;
  m.tenors = {1.0, 2.0};
  m.a = {1.0, 0.4, 0.5, 1.0};
  CHECK_THROWS_AS(m.validate(), ValidationError);  // asymmetric
  m.a = {1.0, 1.4, 1.4, 1.0};
  CHECK_THROWS_AS(m.validate(), ValidationError);  // out of range
  m.a = {0.9, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(m.validate(), ValidationError);  // diagonal
}

TEST_CASE("pca explained fractions on constructed data") {
  // increments covariance proportional to [[1, .6], [.6, 1.0]]:
  // eigenvalues 1.6 and 0.4, fractions 0.8 / 1.0
  const PcaResult r = pca(two_bucket_series(0.6, 0.8, 80));
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] >= r.eigenvalues[1]);
  CHECK(r.cumulative[0] == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(r.cumulative[1] == doctest::Approx(1.0).epsilon(1e-14));

  // rank-1 data: one component explains everything
  const PcaResult one = pca(two_bucket_series(1.0, 0.0, 80));
  CHECK(one.cumulative[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("objective vanishes at the generating parameters") {
  const FactorParams p = fixtures::p2();
  const CorrelationMatrix target = model_target(p, {1, 2, 5, 7, 10, 12, 15, 20});
  CHECK(correlation_objective(p, target) < 1e-28);
  // and grows away from them
  CHECK(correlation_objective(FactorParams::two(-3.0, 3.0, 0.1), target) > 1e-4);
}

TEST_CASE("factor fit recovers a self-consistent target") {
  const FactorParams truth = FactorParams::two(-1.8, 2.1, 0.09);
  const CorrelationMatrix target = model_target(truth, {1, 2, 5, 7, 10, 12, 15, 20});
  const FactorFit fit = fit_factor_params(target, 2, 7, 6);
  CHECK(fit.objective <= 1e-8);
  for (int i = 0; i < target.size(); ++i)
    for (int j = 0; j < target.size(); ++j)
      CHECK(std::fabs(inst_correlation(fit.params, target.tenors[i], target.tenors[j], 0.0) -
                      target.at(i, j)) <= 1e-3);
}

TEST_CASE("factor fit is deterministic for a fixed seed") {
  const CorrelationMatrix target = model_target(fixtures::p2(), {1, 5, 10, 20});
  const FactorFit a = fit_factor_params(target, 2, 11, 4);
  const FactorFit b = fit_factor_params(target, 2, 11, 4);
  CHECK(a.objective == b.objective);
  CHECK(a.params.h[0] == b.params.h[0]);
  CHECK(a.params.kappa[0] == b.params.kappa[0]);
}

TEST_CASE("three factor fit improves or matches the two factor fit") {
  const CorrelationMatrix target = model_target(fixtures::p3(), {1, 2, 5, 10, 20});
  const FactorFit f3 = fit_factor_params(target, 3, 3, 6);
  CHECK(f3.objective <= 1e-6);
}

TEST_SUITE_END();
