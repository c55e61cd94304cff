#pragma once

#include <cstdint>
#include <vector>

#include "ifm/analytic_pricers.hpp"
#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"

namespace ifm {

struct McConfig {
  std::size_t n_paths = 2000;
  std::uint64_t seed = 1;
  std::vector<double> grid;  // slice boundaries, strictly increasing, first > 0
  int substeps = 3;
  bool antithetic = true;
  int workers = 1;

  void validate() const;
};

// Regular slices up to the horizon merged with the mandatory times (resets).
std::vector<double> make_time_grid(double horizon, double slice_dt,
                                   const std::vector<double>& mandatory);

// Lower-triangular factor of the (M+1)x(M+1) correlation of the rate shock
// (row 0) and the M inflation-factor shocks.
struct FactorCholesky {
  int factors = 0;
  std::vector<double> l;  // (M+1)^2 row-major

  double entry(int r, int c) const {
    return l[static_cast<std::size_t>(r) * (factors + 1) + c];
  }
};

FactorCholesky build_correlation(const RateCorrelations& rc);

// The L_i slot of the risk-neutral log-Euler step. Implementations must be
// immutable during a slice (safe for concurrent path blocks).
class DiffusionCoeff {
 public:
  virtual ~DiffusionCoeff() = default;
  virtual double value(int tenor, double f, double t) const = 0;
};

class ConstantSigma final : public DiffusionCoeff {
 public:
  explicit ConstantSigma(std::vector<double> sigmas);
  double value(int tenor, double f, double t) const override;

 private:
  std::vector<double> sigmas_;
};

struct Ensemble {
  double t = 0.0;
  std::size_t n_paths = 0;
  int tenors = 0;
  std::vector<double> x;      // per path
  std::vector<double> log_d;  // per path
  std::vector<double> log_f;  // path-major: [path * tenors + tenor]
  std::vector<std::uint8_t> valid;

  double log_f_at(std::size_t path, int tenor) const {
    return log_f[path * static_cast<std::size_t>(tenors) + static_cast<std::size_t>(tenor)];
  }
  std::size_t invalid_count() const;
};

// Joint simulation of (x, log D, log F_i): exact Ornstein-Uhlenbeck step for
// x, trapezoid + exact shift integral for log D, log-Euler for the forwards.
// Paths carry independent counter-based RNG streams, so results do not depend
// on the worker count. Forwards freeze at their reset.
class Simulator {
 public:
  Simulator(McConfig cfg, G1ppParams g, ShiftFunction shift, FactorParams p,
            RateCorrelations rc, const CpiVolSurface& surface);

  const McConfig& config() const { return cfg_; }
  const Ensemble& state() const { return ens_; }
  const std::vector<double>& resets() const { return resets_; }
  const std::vector<double>& pays() const { return pays_; }
  const std::vector<double>& fwd_cpis() const { return f0_; }
  const G1ppParams& rates() const { return g_; }
  const ShiftFunction& shift() const { return shift_; }
  const FactorParams& factor_params() const { return params_; }
  const RateCorrelations& correlations() const { return rc_; }

  bool done() const { return slice_ >= cfg_.grid.size(); }
  double next_time() const;
  void advance_slice(const DiffusionCoeff& coeff);
  void advance_to(double t, const DiffusionCoeff& coeff);  // t must be a grid time

  double invalid_fraction() const;
  void ensure_health() const;  // throws past the 0.1% invalid-path budget

 private:
  struct SubstepPlan;
  void run_paths(const std::vector<SubstepPlan>& plans, const DiffusionCoeff& coeff,
                 std::size_t lo, std::size_t hi);

  McConfig cfg_;
  G1ppParams g_;
  ShiftFunction shift_;
  FactorParams params_;
  RateCorrelations rc_;
  FactorCholesky chol_;
  std::vector<double> resets_, pays_, f0_;
  Ensemble ens_;
  std::size_t slice_ = 0;
  std::uint64_t step_count_ = 0;
};

// Reset-time snapshots for each surface tenor covered by the grid.
struct McRun {
  struct Capture {
    double reset = 0.0;
    std::vector<double> log_f, log_d, x;  // per path

    bool present() const { return !log_f.empty(); }
  };

  std::size_t n_paths = 0;
  bool antithetic = false;
  std::vector<std::uint8_t> valid;  // final validity, applied to every capture
  std::vector<Capture> captures;    // index-aligned with the surface tenors

  const Capture& at_reset(int tenor) const;
};

// Drives the simulator through its whole grid, capturing states at resets.
McRun simulate_to_resets(Simulator& sim, const DiffusionCoeff& coeff);

// Mean and standard error of per-path (discounted) payoffs over valid paths;
// antithetic pairs are averaged before the variance estimate.
PriceQuote reduce_payoffs(const std::vector<double>& payoff,
                          const std::vector<std::uint8_t>& valid, bool antithetic);

// Pathwise-discounted price: D(pay) = D(reset) * P(reset, pay; x_reset).
PriceQuote price_zc_option_mc(const ZcInstrument& inst, int tenor, const McRun& run,
                              const G1ppParams& g, const ShiftFunction& shift);

PriceQuote price_yoy_option_mc(const YoyInstrument& inst, int tenor_i, int tenor_j,
                               const McRun& run, const G1ppParams& g, const ShiftFunction& shift);

}  // namespace ifm
