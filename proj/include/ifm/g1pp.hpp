#pragma once

#include <string>
#include <vector>

#include "ifm/market_data.hpp"

namespace ifm {

// Right-continuous piecewise-constant function of time: values[k] applies on
// [ends[k-1], ends[k]) with ends[-1] = 0, and the last value extends flat.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(std::vector<double> ends, std::vector<double> values);
  static PiecewiseConstant constant(double v);

  double at(double t) const;
  double integral(double t0, double t1) const;  // exact

  const std::vector<double>& ends() const { return ends_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> ends_;
  std::vector<double> values_;
};

// Gaussian short rate r_t = x_t + phi_t with dx = -a_t x dt + sigma^r_t dW.
struct G1ppParams {
  PiecewiseConstant mean_reversion;  // a_t
  PiecewiseConstant vol;             // sigma^r_t >= 0

  static G1ppParams make(PiecewiseConstant a, PiecewiseConstant sigma);
};

// b(t, T) = integral over [t, T] of exp(-integral over [t, v] of a).
double b_factor(const G1ppParams& g, double t, double T);

using ShiftFunction = PiecewiseConstant;

// Piecewise-constant shift phi on the curve's pillar intervals such that model
// zero-coupon bonds reprice the curve at every pillar.
ShiftFunction calibrate_shift(const G1ppParams& g, const DiscountCurve& curve);

// Shift-free bond P^z(t, T; x) = exp(+1/2 int (b sigma)^2 - b x).
double pz_bond(const G1ppParams& g, double t, double x, double T);

// Deterministic part and x-loading of a bond price: P = exp(log_det - b * x).
struct BondCoeffs {
  double log_det = 0.0;
  double b = 0.0;
  double price(double x) const;
};
BondCoeffs bond_coeffs(const G1ppParams& g, const ShiftFunction& shift, double t, double T);

double zcb_price(const G1ppParams& g, const ShiftFunction& shift, double t, double x, double T);

// Conditional moments of x over [t0, t1]: x(t1) = decay * x(t0) + N(0, var).
struct OuStep {
  double decay = 1.0;
  double var = 0.0;
};
OuStep ou_step(const G1ppParams& g, double t0, double t1);

// g1pp.csv schema: t,sigma_r (vol value applies up to and excluding t).
PiecewiseConstant load_g1pp_vol(const std::string& path);
void save_g1pp_vol(const std::string& path, const PiecewiseConstant& vol);

}  // namespace ifm
