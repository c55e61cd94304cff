#include "ifm/analytic_pricers.hpp"

#include <cmath>

#include "ifm/errors.hpp"
#include "ifm/num.hpp"

namespace ifm {

double ZcInstrument::strike() const {
  if (!(ref_index > 0.0)) throw ValidationError("zc instrument: reference index must be positive");
  return ref_index * std::pow(1.0 + kbar, reset);
}

double black_option(OptionKind kind, double fwd, double strike, double total_var) {
  if (!(fwd > 0.0) || !(strike > 0.0))
    throw ValidationError("black: forward and strike must be positive");
  if (total_var <= 0.0) {
    const double intrinsic = (kind == OptionKind::Cap) ? fwd - strike : strike - fwd;
    return std::max(intrinsic, 0.0);
  }
  const double sq = std::sqrt(total_var);
  const double d1 = std::log(fwd / strike) / sq + 0.5 * sq;
  const double d2 = d1 - sq;
  if (kind == OptionKind::Cap) return fwd * num::norm_cdf(d1) - strike * num::norm_cdf(d2);
  return strike * num::norm_cdf(-d2) - fwd * num::norm_cdf(-d1);
}

PriceQuote zc_swap(const ZcInstrument& inst, const DiscountCurve& curve, double fwd_cpi) {
  if (inst.kind != OptionKind::Swap) throw ValidationError("zc_swap: instrument is not a swap");
  const double df = curve.discount(inst.pay);
  return PriceQuote{inst.notional * df * (fwd_cpi - inst.strike()), 0.0};
}

PriceQuote zc_cap_floor(const ZcInstrument& inst, const DiscountCurve& curve, double fwd_cpi,
                        double sigma) {
  if (inst.kind == OptionKind::Swap)
    throw ValidationError("zc_cap_floor: instrument must be a cap or floor");
  if (sigma < 0.0) throw ValidationError("zc_cap_floor: negative vol");
  const double df = curve.discount(inst.pay);
  const double w = sigma * sigma * inst.reset;
  return PriceQuote{inst.notional * df * black_option(inst.kind, fwd_cpi, inst.strike(), w), 0.0};
}

double implied_vol(double price, const ZcInstrument& inst, const DiscountCurve& curve,
                   double fwd_cpi) {
  if (inst.kind == OptionKind::Swap)
    throw ValidationError("implied_vol: instrument must be a cap or floor");
  const double df = curve.discount(inst.pay);
  const double strike = inst.strike();
  const double scale = inst.notional * df;
  const double intrinsic =
      scale * std::max((inst.kind == OptionKind::Cap) ? fwd_cpi - strike : strike - fwd_cpi, 0.0);
  const double bound = scale * ((inst.kind == OptionKind::Cap) ? fwd_cpi : strike);
  const double tol = 1e-12 * std::max(bound, 1.0);
  if (price < intrinsic - tol || price >= bound - tol)
    throw ValidationError("implied_vol: price outside the no-arbitrage band");

  double lo = 1e-6, hi = 5.0;
  auto value_at = [&](double sigma) {
    return scale * black_option(inst.kind, fwd_cpi, strike, sigma * sigma * inst.reset);
  };
  if (price <= value_at(lo)) return lo;
  if (price >= value_at(hi)) throw ValidationError("implied_vol: price above the vol bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value_at(mid) < price ? lo : hi) = mid;
  }
  // Newton polish using the Black vega.
  double sigma = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double w = sigma * sigma * inst.reset;
    const double sq = std::sqrt(w);
    const double d1 = std::log(fwd_cpi / strike) / sq + 0.5 * sq;
    const double vega = scale * fwd_cpi * num::norm_pdf(d1) * std::sqrt(inst.reset);
    if (vega <= 0.0) break;
    const double next = sigma - (value_at(sigma) - price) / vega;
    if (!(next > lo && next < hi)) break;
    sigma = next;
  }
  return sigma;
}

namespace {

// int_0^T sigma_F nu_bar(s) ds with Gauss-Legendre on each rate-parameter
// breakpoint interval.
double drift_integral(const YoyUnderlier& u, double t_p, const FactorParams& p,
                      const RateCorrelations& rc, const G1ppParams& g) {
  if (u.reset <= 0.0) return 0.0;
  const auto pts = num::merged_breakpoints(0.0, u.reset,
                                           {&g.mean_reversion.ends(), &g.vol.ends()});
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    acc += num::gl_integrate(
        [&](double s) { return nu_bar(p, rc, g, u.pay, u.reset, t_p, s); }, pts[k], pts[k + 1],
        32);
  return u.sigma * acc;
}

void check_yoy(const YoyUnderlier& i, const YoyUnderlier& j, double t_p) {
  if (!(i.reset < j.reset)) throw ValidationError("yoy: need T_i < T_j");
  if (t_p < j.reset - 1e-12) throw ValidationError("yoy: pay date before the second reset");
  if (!(i.fwd_cpi > 0.0) || !(j.fwd_cpi > 0.0))
    throw ValidationError("yoy: forwards must be positive");
}

}  // namespace

double yoy_forward_ratio(const YoyUnderlier& i, const YoyUnderlier& j, double t_p,
                         const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g) {
  check_yoy(i, j, t_p);
  const double drift_j = drift_integral(j, t_p, p, rc, g);
  const double drift_i = drift_integral(i, t_p, p, rc, g);
  // Convexity of -log F_i(T_i): own variance minus the cross-covariance
  // accumulated while both forwards diffuse.
  const double own = i.sigma * i.sigma * integrated_zeta(p, i.reset, i.reset, 0.0, i.reset);
  const double cross = i.sigma * j.sigma * integrated_zeta(p, i.reset, j.reset, 0.0, i.reset);
  return (j.fwd_cpi / i.fwd_cpi) * std::exp(drift_j - drift_i + own - cross);
}

double yoy_total_variance(const YoyUnderlier& i, const YoyUnderlier& j, const FactorParams& p) {
  if (!(i.reset < j.reset)) throw ValidationError("yoy: need T_i < T_j");
  const double w_i = i.sigma * i.sigma * integrated_zeta(p, i.reset, i.reset, 0.0, i.reset);
  const double w_j = j.sigma * j.sigma * integrated_zeta(p, j.reset, j.reset, 0.0, j.reset);
  const double cross = i.sigma * j.sigma * integrated_zeta(p, i.reset, j.reset, 0.0, i.reset);
  return w_j + w_i - 2.0 * cross;
}

PriceQuote yoy_swap(const YoyInstrument& inst, const DiscountCurve& curve, const YoyUnderlier& i,
                    const YoyUnderlier& j, const FactorParams& p, const RateCorrelations& rc,
                    const G1ppParams& g) {
  if (inst.kind != OptionKind::Swap) throw ValidationError("yoy_swap: instrument is not a swap");
  const double x = yoy_forward_ratio(i, j, inst.pay, p, rc, g);
  return PriceQuote{inst.notional * curve.discount(inst.pay) * (x - inst.strike()), 0.0};
}

PriceQuote yoy_cap_floor(const YoyInstrument& inst, const DiscountCurve& curve,
                         const YoyUnderlier& i, const YoyUnderlier& j, const FactorParams& p,
                         const RateCorrelations& rc, const G1ppParams& g) {
  if (inst.kind == OptionKind::Swap)
    throw ValidationError("yoy_cap_floor: instrument must be a cap or floor");
  const double x = yoy_forward_ratio(i, j, inst.pay, p, rc, g);
  const double eta = yoy_total_variance(i, j, p);
  const double value = inst.notional * curve.discount(inst.pay) *
                       black_option(inst.kind, x, inst.strike(), eta);
  return PriceQuote{value, 0.0};
}

}  // namespace ifm
