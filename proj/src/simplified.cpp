#include "ifm/simplified.hpp"

#include <algorithm>
#include <cmath>

#include "ifm/errors.hpp"

namespace ifm {

double q_of_strike(const CpiVolSurface& surface, int tenor, double strike,
                   const SimplifiedParams& sp) {
  if (!(strike > 0.0)) throw ValidationError("simplified: strike must be positive");
  if (!(sp.eta > 0.0)) throw ValidationError("simplified: eta must be positive");
  const auto& ten = surface.tenor(tenor);
  // Keep lookups inside the smile's sanity band; beyond the quotes the
  // interpolant is flat, so the clamped value is the extrapolated one anyway.
  const double k = std::clamp(strike, 0.5 * ten.strikes.front(), 1.5 * ten.strikes.back());
  const double vol = ten.vol_at(k);
  const double slope = ten.dvol_dk(k);
  const double denom = 1.0 - (k * std::log(k / ten.fwd_cpi) / vol) * slope;
  return vol / std::max(1.0 / sp.eta, denom);
}

SimplifiedCoeff::SimplifiedCoeff(const CpiVolSurface& surface, const FactorParams& p,
                                 SimplifiedParams sp)
    : surface_(surface), params_(p), sp_(sp) {
  if (!(sp_.eta > 0.0)) throw ValidationError("simplified: eta must be positive");
}

double SimplifiedCoeff::value(int tenor, double f, double t) const {
  const double reset = surface_.tenor(tenor).reset;
  const double z = zeta(params_, reset, reset, t);
  return q_of_strike(surface_, tenor, f, sp_) / std::sqrt(z);
}

}  // namespace ifm
