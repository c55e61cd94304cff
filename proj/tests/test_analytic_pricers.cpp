#include <doctest.h>

#include <cmath>

#include "ifm/analytic_pricers.hpp"
#include "ifm/errors.hpp"
#include "support/fixtures.hpp"

using namespace ifm;

TEST_SUITE_BEGIN("analytic_pricers");

TEST_CASE("black option: degenerate variance and ATM closed form") {
  CHECK(black_option(OptionKind::Cap, 110.0, 100.0, 0.0) == 10.0);
  CHECK(black_option(OptionKind::Floor, 110.0, 100.0, 0.0) == 0.0);
  const double w = 0.02442 * 0.02442;
  const double atm = 124.43 * (2.0 * num::norm_cdf(0.5 * std::sqrt(w)) - 1.0);
  CHECK(black_option(OptionKind::Cap, 124.43, 124.43, w) == doctest::Approx(atm).epsilon(1e-13));
}

TEST_CASE("zero coupon strike convention") {
  const ZcInstrument inst{OptionKind::Cap, 1.0, 0.02, 153.93, 10.0, 10.0};
  CHECK(inst.strike() == doctest::Approx(153.93 * std::pow(1.02, 10.0)).epsilon(1e-14));
}

TEST_CASE("zero coupon swap and cap against frozen values") {
  const DiscountCurve curve = fixtures::table_curve();
  const ZcInstrument swap{OptionKind::Swap, 1.0, 0.02, 153.93, 10.0, 10.0};
  CHECK(zc_swap(swap, curve, 153.93).value ==
        doctest::Approx(-25.605972488614768).epsilon(1e-12));

  const ZcInstrument cap{OptionKind::Cap, 1.0, 0.0, 124.43, 1.0, 1.0};
  CHECK(zc_cap_floor(cap, curve, 124.43, 0.02442).value ==
        doctest::Approx(1.1704888815114733).epsilon(1e-12));
}

TEST_CASE("put-call parity across the quoted grid") {
  const DiscountCurve curve = fixtures::table_curve();
  const CpiVolSurface vols = fixtures::table_vols();
  for (int i = 0; i < vols.size(); ++i) {
    const VolTenor& t = vols.tenor(i);
    for (std::size_t k = 0; k < t.kbars.size(); ++k) {
      ZcInstrument inst{OptionKind::Cap, 1.0, t.kbars[k], t.fwd_cpi, t.reset, t.pay};
      const double cap = zc_cap_floor(inst, curve, t.fwd_cpi, t.vols[k]).value;
      inst.kind = OptionKind::Floor;
      const double floor = zc_cap_floor(inst, curve, t.fwd_cpi, t.vols[k]).value;
      inst.kind = OptionKind::Swap;
      const double swap = zc_swap(inst, curve, t.fwd_cpi).value;
      CHECK(cap - floor == doctest::Approx(swap).epsilon(1e-12).scale(t.fwd_cpi));
    }
  }
}

TEST_CASE("implied vol round trip on the quoted grid") {
  const DiscountCurve curve = fixtures::table_curve();
  const CpiVolSurface vols = fixtures::table_vols();
  for (int i = 0; i < vols.size(); ++i) {
    const VolTenor& t = vols.tenor(i);
    for (std::size_t k = 0; k < t.kbars.size(); ++k) {
      const OptionKind kind = t.kbars[k] > 0.0 ? OptionKind::Cap : OptionKind::Floor;
      const ZcInstrument inst{kind, 1.0, t.kbars[k], t.fwd_cpi, t.reset, t.pay};
      const double price = zc_cap_floor(inst, curve, t.fwd_cpi, t.vols[k]).value;
      CHECK(implied_vol(price, inst, curve, t.fwd_cpi) ==
            doctest::Approx(t.vols[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("implied vol edge cases") {
  const DiscountCurve curve = fixtures::table_curve();
  const ZcInstrument cap{OptionKind::Cap, 1.0, -0.01, 124.43, 1.0, 1.0};
  const double intrinsic = curve.discount(1.0) * (124.43 - cap.strike());
  CHECK_THROWS_AS(implied_vol(0.5 * intrinsic, cap, curve, 124.43), ValidationError);
  // at the intrinsic boundary the solver reports the lower vol bracket
  CHECK(implied_vol(intrinsic, cap, curve, 124.43) == 1e-6);
  // just above it a genuine (tiny) implied vol exists
  const double near = implied_vol(intrinsic * (1.0 + 1e-9), cap, curve, 124.43);
  CHECK(near > 1e-6);
  CHECK(near < 0.01);
  CHECK_THROWS_AS(implied_vol(2.0 * curve.discount(1.0) * 124.43, cap, curve, 124.43),
                  ValidationError);
}

TEST_CASE("yoy forward ratio: frozen table value") {
  const G1ppParams g = fixtures::table_g1pp();
  const FactorParams p = fixtures::p2();
  const RateCorrelations rc = RateCorrelations::flat(2, -0.5);
  const YoyUnderlier ui{1.0, 1.0, 124.43, 0.024353470776263292};
  const YoyUnderlier uj{2.0, 2.0, 127.26, 0.01979515290370705};
  CHECK(yoy_forward_ratio(ui, uj, 2.0, p, rc, g) ==
        doctest::Approx(1.0227393573490786).epsilon(1e-10));
  CHECK(yoy_total_variance(ui, uj, p) ==
        doctest::Approx(0.00042514893187208566).epsilon(1e-10));
}

TEST_CASE("yoy ratio degenerates to the forward ratio without rates or smile spread") {
  const G1ppParams g0 =
      G1ppParams::make(PiecewiseConstant::constant(0.02), PiecewiseConstant::constant(0.0));
  const FactorParams one = FactorParams::one();
  const RateCorrelations rc = RateCorrelations::flat(1, -0.5);
  const YoyUnderlier ui{1.0, 1.0, 124.43, 0.02};
  const YoyUnderlier uj{2.0, 2.0, 127.26, 0.02};
  CHECK(yoy_forward_ratio(ui, uj, 2.0, one, rc, g0) ==
        doctest::Approx(127.26 / 124.43).epsilon(1e-14));
}

TEST_CASE("yoy pricing: frozen values and parity") {
  const DiscountCurve curve = fixtures::table_curve();
  const G1ppParams g = fixtures::table_g1pp();
  const FactorParams p = fixtures::p2();
  const RateCorrelations rc = RateCorrelations::flat(2, -0.5);
  const YoyUnderlier ui{1.0, 1.0, 124.43, 0.024353470776263292};
  const YoyUnderlier uj{2.0, 2.0, 127.26, 0.01979515290370705};

  YoyInstrument inst{OptionKind::Cap, 1.0, 0.02, 1.0, 2.0, 2.0};
  const double cap = yoy_cap_floor(inst, curve, ui, uj, p, rc, g).value;
  CHECK(cap == doctest::Approx(0.009230936190343451).epsilon(1e-10));
  inst.kind = OptionKind::Floor;
  const double floor = yoy_cap_floor(inst, curve, ui, uj, p, rc, g).value;
  CHECK(floor == doctest::Approx(0.006661692932642635).epsilon(1e-10));
  inst.kind = OptionKind::Swap;
  const double swap = yoy_swap(inst, curve, ui, uj, p, rc, g).value;
  CHECK(swap == doctest::Approx(0.002569243257700816).epsilon(1e-10));
  CHECK(cap - floor == doctest::Approx(swap).epsilon(1e-13));

  // parity across a strike sweep
  for (double kbar : {-0.01, 0.0, 0.01, 0.03}) {
    YoyInstrument k{OptionKind::Cap, 1.0, kbar, 1.0, 2.0, 2.0};
    const double c = yoy_cap_floor(k, curve, ui, uj, p, rc, g).value;
    k.kind = OptionKind::Floor;
    const double f = yoy_cap_floor(k, curve, ui, uj, p, rc, g).value;
    k.kind = OptionKind::Swap;
    const double s = yoy_swap(k, curve, ui, uj, p, rc, g).value;
    CHECK(c - f == doctest::Approx(s).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("yoy preconditions") {
  const DiscountCurve curve = fixtures::table_curve();
  const G1ppParams g = fixtures::table_g1pp();
  const FactorParams p = fixtures::p2();
  const RateCorrelations rc = RateCorrelations::flat(2, -0.5);
  const YoyUnderlier ui{1.0, 1.0, 124.43, 0.02};
  const YoyUnderlier uj{2.0, 2.0, 127.26, 0.02};
  const YoyInstrument bad_order{OptionKind::Cap, 1.0, 0.0, 2.0, 1.0, 2.0};
  CHECK_THROWS_AS(yoy_cap_floor(bad_order, curve, uj, ui, p, rc, g), ValidationError);
  const YoyInstrument early_pay{OptionKind::Cap, 1.0, 0.0, 1.0, 2.0, 1.5};
  CHECK_THROWS_AS(yoy_cap_floor(early_pay, curve, ui, uj, p, rc, g), ValidationError);
}

TEST_SUITE_END();
