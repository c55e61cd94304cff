#pragma once

#include <vector>

#include "ifm/factors.hpp"
#include "ifm/market_data.hpp"
#include "ifm/mc_engine.hpp"

namespace ifm {

struct SimplifiedParams {
  double eta = 10.0;  // algorithmic cap on the strike-space amplification
};

// q_i(K) = Sigma_i(K) / max(1/eta, 1 - (K ln(K/F_i0) / Sigma_i(K)) dSigma_i/dK).
// Total: the cap keeps the denominator away from zero for any smile.
double q_of_strike(const CpiVolSurface& surface, int tenor, double strike,
                   const SimplifiedParams& sp = {});

// Calibration-free diffusion coefficient Lambda_i(F, t) = q_i(F) / sqrt(zeta_ii(t)).
class SimplifiedCoeff final : public DiffusionCoeff {
 public:
  SimplifiedCoeff(const CpiVolSurface& surface, const FactorParams& p, SimplifiedParams sp = {});
  double value(int tenor, double f, double t) const override;

 private:
  CpiVolSurface surface_;
  FactorParams params_;
  SimplifiedParams sp_;
};

}  // namespace ifm
