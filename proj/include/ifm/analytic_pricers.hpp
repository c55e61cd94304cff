#pragma once

#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"

namespace ifm {

enum class OptionKind { Swap, Cap, Floor };

// Zero-coupon contract on I(T_i)/I_bar - 1 paid at T_i~, strike quoted as a
// compounded annual rate kbar: K = I_bar (1 + kbar)^{T_i}.
struct ZcInstrument {
  OptionKind kind = OptionKind::Cap;
  double notional = 1.0;
  double kbar = 0.0;
  double ref_index = 0.0;  // I_bar
  double reset = 0.0;      // T_i
  double pay = 0.0;        // T_i~

  double strike() const;
};

// Year-on-year contract on I(T_j)/I(T_i) - 1 paid at T_p (T_i < T_j <= T_p).
struct YoyInstrument {
  OptionKind kind = OptionKind::Cap;
  double notional = 1.0;
  double kbar_y = 0.0;
  double reset_a = 0.0;  // T_i
  double reset_b = 0.0;  // T_j
  double pay = 0.0;      // T_p

  double strike() const { return 1.0 + kbar_y; }
};

struct PriceQuote {
  double value = 0.0;
  double std_error = 0.0;
};

// Undiscounted Black option on a lognormal forward with total variance w.
double black_option(OptionKind kind, double fwd, double strike, double total_var);

PriceQuote zc_swap(const ZcInstrument& inst, const DiscountCurve& curve, double fwd_cpi);
PriceQuote zc_cap_floor(const ZcInstrument& inst, const DiscountCurve& curve, double fwd_cpi,
                        double sigma);

// Bisection with Newton polish; errors when the price sits outside the
// no-arbitrage band, returns the lower bracket at the intrinsic boundary.
double implied_vol(double price, const ZcInstrument& inst, const DiscountCurve& curve,
                   double fwd_cpi);

struct YoyUnderlier {
  double reset = 0.0;  // T
  double pay = 0.0;    // T~
  double fwd_cpi = 0.0;
  double sigma = 0.0;
};

// E^{T_p}[F_j(T_j)/F_i(T_i)] including the measure-change drift and the
// cross-covariance convexity of the shared inflation factors.
double yoy_forward_ratio(const YoyUnderlier& i, const YoyUnderlier& j, double t_p,
                         const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g);

// Variance of log(F_j(T_j)/F_i(T_i)).
double yoy_total_variance(const YoyUnderlier& i, const YoyUnderlier& j, const FactorParams& p);

PriceQuote yoy_swap(const YoyInstrument& inst, const DiscountCurve& curve, const YoyUnderlier& i,
                    const YoyUnderlier& j, const FactorParams& p, const RateCorrelations& rc,
                    const G1ppParams& g);
PriceQuote yoy_cap_floor(const YoyInstrument& inst, const DiscountCurve& curve,
                         const YoyUnderlier& i, const YoyUnderlier& j, const FactorParams& p,
                         const RateCorrelations& rc, const G1ppParams& g);

}  // namespace ifm
