#pragma once

#include <string>
#include <vector>

#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"
#include "ifm/mc_engine.hpp"

namespace ifm {

// Strike grid of the leverage calibration, in contract-rate space; the
// per-tenor log-moneyness nodes are y = T_i log(1+Kbar).
struct LeverageGrid {
  double kbar_lo = -0.02;
  double kbar_hi = 0.05;
  double kbar_step = 0.001;

  std::vector<double> kbars() const;
  std::vector<double> y_nodes(double reset) const;
};

// Per-tenor leverage values on (y, t) nodes, published slice by slice.
class LeverageSurface {
 public:
  LeverageSurface() = default;
  explicit LeverageSurface(std::vector<std::vector<double>> y_grids);

  int tenor_count() const { return static_cast<int>(y_.size()); }
  int slice_count() const { return static_cast<int>(times_.size()); }
  const std::vector<double>& slice_times() const { return times_; }
  const std::vector<double>& y_grid(int tenor) const;
  double node(int tenor, int slice, int iy) const;

  // rows[tenor][iy], all finite and positive
  void push_slice(double t, const std::vector<std::vector<double>>& rows);

  // piecewise-linear in y and t, flat beyond the grid edges
  double value(int tenor, double y, double t) const;
  // value on one slice, linear in y only (the bootstrap's slice-hold rule)
  double slice_value(int tenor, int slice, double y) const;

 private:
  std::vector<double> times_;
  std::vector<std::vector<double>> y_;       // per tenor
  std::vector<std::vector<double>> values_;  // per tenor, [slice * ny + iy]
};

LeverageSurface load_leverage(const std::string& path);
void save_leverage(const std::string& path, const LeverageSurface& surface);

// Diffusion provider backed by the surface: y = log(f / F_i(0)).
class LeverageCoeff final : public DiffusionCoeff {
 public:
  enum class Mode {
    bilinear,      // pricing: interpolate across slices in t
    latest_slice,  // calibration: hold the latest published slice
  };

  LeverageCoeff(const LeverageSurface& surface, std::vector<double> fwd_cpis, Mode mode);
  double value(int tenor, double f, double t) const override;

 private:
  const LeverageSurface* surface_;
  std::vector<double> f0_;
  Mode mode_;
};

// Warning counters accumulated by the bootstrap, one row per slice.
struct LeverageReport {
  struct Slice {
    double t = 0.0;
    int bracket_floors = 0;    // Dupire denominator bracket clamped at 1e-4
    int negative_floors = 0;   // negative L^2 replaced by (0.1 * previous)^2
    int gradient_fallbacks = 0;  // vanishing dPrice/dw, theta term dropped
  };
  std::vector<Slice> slices;

  int total(int Slice::*field) const;
};

// One tenor's slice solve of the total-implied-variance Dupire equation.
// theta == nullptr means the deterministic-rate form (no MC correction);
// prev == nullptr disables the negative-L^2 floor (first slice).
std::vector<double> slice_calibrate(const DiscountCurve& curve, const CpiVolSurface& vols,
                                    const FactorParams& p, int tenor,
                                    const std::vector<double>& y, double t,
                                    const std::vector<double>* theta,
                                    const std::vector<double>* prev, double notional,
                                    LeverageReport::Slice* counters);

// The no-simulation first slice: slice_calibrate with theta == 0 for every
// tenor, at time t1.
std::vector<std::vector<double>> first_slice(const DiscountCurve& curve,
                                             const CpiVolSurface& vols, const FactorParams& p,
                                             double t1, const LeverageGrid& grid,
                                             LeverageReport::Slice* counters);

struct ThetaEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// MC estimate of the rate-coupling Dupire correction for one (tenor, strike)
// at the simulator's current time, using the ensemble as-is. The analytic
// cap/floor subtraction prices off the market total-implied-variance surface.
// This is the correction for options paying at the slice time; the bootstrap
// below prices options paying at the tenor's pay date, where it cancels, so
// it serves as a simulation diagnostic rather than a calibration input.
ThetaEstimate theta_estimate(OptionKind kind, const Simulator& sim, int tenor, double strike,
                             const DiscountCurve& curve, const CpiVolSurface& vols,
                             const DiffusionCoeff& coeff, double notional = 1.0);

// Full bootstrap: analytic first slice, then slice by slice out to the last
// grid time, holding each tenor constant past its reset. Because the slice
// options pay at the tenor's fixed pay date, the Dupire equation needs no
// simulation correction and the whole surface is deterministic; cfg.grid
// supplies the slice times, and the rate/correlation inputs are kept for
// interface stability.
LeverageSurface calibrate_leverage(const DiscountCurve& curve, const CpiVolSurface& vols,
                                   const FactorParams& p, const RateCorrelations& rc,
                                   const G1ppParams& g, const ShiftFunction& shift,
                                   const McConfig& cfg, const LeverageGrid& grid = {},
                                   double notional = 1.0, LeverageReport* report = nullptr);

}  // namespace ifm
