#include "ifm/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ifm/errors.hpp"
#include "ifm/num.hpp"

namespace ifm {

void McConfig::validate() const {
  if (n_paths < 2) throw ValidationError("mc: need at least 2 paths");
  if (antithetic && n_paths % 2 != 0)
    throw ValidationError("mc: antithetic sampling needs an even path count");
  if (substeps < 1) throw ValidationError("mc: substeps must be >= 1");
  if (workers < 1) throw ValidationError("mc: workers must be >= 1");
  if (grid.empty()) throw ValidationError("mc: empty time grid");
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > prev)) throw ValidationError("mc: grid must be strictly increasing and positive");
    prev = t;
  }
}

std::vector<double> make_time_grid(double horizon, double slice_dt,
                                   const std::vector<double>& mandatory) {
  if (!(horizon > 0.0) || !(slice_dt > 0.0))
    throw ValidationError("mc: horizon and slice width must be positive");
  std::vector<double> grid;
  for (int k = 1; k * slice_dt <= horizon + 1e-12; ++k) grid.push_back(k * slice_dt);
  for (double t : mandatory) {
    if (!(t > 0.0) || t > horizon + 1e-9)
      throw ValidationError("mc: mandatory time outside (0, horizon]");
    grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             grid.end());
  if (grid.empty() || std::abs(grid.back() - horizon) > 1e-9) grid.push_back(horizon);
  return grid;
}

FactorCholesky build_correlation(const RateCorrelations& rc) {
  const int m = static_cast<int>(rc.rho.size());
  if (m < 1) throw ValidationError("correlation: no inflation factors");
  for (double r : rc.rho)
    if (std::abs(r) > 1.0) throw ValidationError("correlation: rho outside [-1, 1]");
  if (rc.sum_sq() > 1.0 + 1e-12)
    throw ValidationError("correlation: sum of squared rho exceeds 1");

  const int n = m + 1;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = 1.0;
  for (int alpha = 1; alpha < n; ++alpha) {
    a[static_cast<std::size_t>(alpha) * n] = rc.rho[alpha - 1];
    a[static_cast<std::size_t>(alpha)] = rc.rho[alpha - 1];
  }
  FactorCholesky out;
  out.factors = m;
  out.l = num::cholesky_lower_psd(a, n);
  return out;
}

ConstantSigma::ConstantSigma(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {
  for (double s : sigmas_)
    if (s < 0.0) throw ValidationError("constant coefficient: negative sigma");
}

double ConstantSigma::value(int tenor, double, double) const {
  return sigmas_.at(static_cast<std::size_t>(tenor));
}

std::size_t Ensemble::invalid_count() const {
  std::size_t k = 0;
  for (auto v : valid) k += (v == 0);
  return k;
}

struct Simulator::SubstepPlan {
  double ta = 0.0;
  double dt = 0.0;
  double sqrt_dt = 0.0;
  double decay = 1.0;
  double sqrt_var = 0.0;
  double phi_int = 0.0;
  std::uint64_t step_index = 0;
  std::vector<std::uint8_t> active;       // per tenor
  std::vector<double> nu;                 // per tenor
  std::vector<double> zeta;               // per tenor
  std::vector<double> lam;                // tenor-major: [tenor * M + alpha]
};

Simulator::Simulator(McConfig cfg, G1ppParams g, ShiftFunction shift, FactorParams p,
                     RateCorrelations rc, const CpiVolSurface& surface)
    : cfg_(std::move(cfg)),
      g_(std::move(g)),
      shift_(std::move(shift)),
      params_(p),
      rc_(rc),
      chol_(build_correlation(rc)) {
  cfg_.validate();
  if (static_cast<int>(rc_.rho.size()) != params_.factor_count)
    throw ValidationError("simulator: rho count differs from the factor count");
  const int n_tenors = static_cast<int>(surface.size());
  if (n_tenors == 0) throw ValidationError("simulator: empty vol surface");
  for (int i = 0; i < n_tenors; ++i) {
    const auto& ten = surface.tenor(i);
    resets_.push_back(ten.reset);
    pays_.push_back(ten.pay);
    f0_.push_back(ten.fwd_cpi);
  }
  // Every reset inside the simulated horizon must be a slice boundary.
  for (double r : resets_) {
    if (r > cfg_.grid.back() + 1e-9) continue;
    bool found = false;
    for (double t : cfg_.grid) found = found || std::abs(t - r) < 1e-9;
    if (!found) throw ValidationError("simulator: grid missing a reset time");
  }

  ens_.t = 0.0;
  ens_.n_paths = cfg_.n_paths;
  ens_.tenors = n_tenors;
  ens_.x.assign(cfg_.n_paths, 0.0);
  ens_.log_d.assign(cfg_.n_paths, 0.0);
  ens_.log_f.resize(cfg_.n_paths * static_cast<std::size_t>(n_tenors));
  for (std::size_t pth = 0; pth < cfg_.n_paths; ++pth)
    for (int i = 0; i < n_tenors; ++i)
      ens_.log_f[pth * static_cast<std::size_t>(n_tenors) + i] = std::log(f0_[i]);
  ens_.valid.assign(cfg_.n_paths, 1);
}

double Simulator::next_time() const {
  if (done()) throw ValidationError("simulator: grid exhausted");
  return cfg_.grid[slice_];
}

void Simulator::run_paths(const std::vector<SubstepPlan>& plans, const DiffusionCoeff& coeff,
                          std::size_t lo, std::size_t hi) {
  const int m = params_.factor_count;
  const int n_tenors = ens_.tenors;
  std::vector<double> z(static_cast<std::size_t>(m) + 1);
  std::vector<double> eps(static_cast<std::size_t>(m) + 1);
  for (std::size_t pth = lo; pth < hi; ++pth) {
    if (!ens_.valid[pth]) continue;
    const std::uint64_t stream = cfg_.antithetic ? pth / 2 : pth;
    const double sign = (cfg_.antithetic && (pth & 1)) ? -1.0 : 1.0;
    double x = ens_.x[pth];
    double log_d = ens_.log_d[pth];
    double* log_f = &ens_.log_f[pth * static_cast<std::size_t>(n_tenors)];
    bool ok = true;

    for (const auto& plan : plans) {
      for (int d = 0; d <= m; ++d)
        z[d] = sign * num::normal_draw(cfg_.seed, stream, plan.step_index,
                                       static_cast<std::uint64_t>(d));
      for (int r = 0; r <= m; ++r) {
        double acc = 0.0;
        for (int c = 0; c <= r; ++c) acc += chol_.entry(r, c) * z[c];
        eps[r] = acc;
      }

      const double xn = plan.decay * x + plan.sqrt_var * eps[0];
      log_d -= 0.5 * (x + xn) * plan.dt + plan.phi_int;
      x = xn;

      for (int i = 0; i < n_tenors; ++i) {
        if (!plan.active[i]) continue;
        const double f = std::exp(log_f[i]);
        const double l = coeff.value(i, f, plan.ta);
        double shock = 0.0;
        for (int alpha = 0; alpha < m; ++alpha)
          shock += plan.lam[static_cast<std::size_t>(i) * m + alpha] * eps[alpha + 1];
        log_f[i] += (plan.nu[i] * l - 0.5 * l * l * plan.zeta[i]) * plan.dt +
                    l * plan.sqrt_dt * shock;
        ok = ok && std::isfinite(log_f[i]);
      }
      ok = ok && std::isfinite(x) && std::isfinite(log_d);
      if (!ok) break;
    }

    if (!ok) {
      ens_.valid[pth] = 0;
    } else {
      ens_.x[pth] = x;
      ens_.log_d[pth] = log_d;
    }
  }
}

void Simulator::advance_slice(const DiffusionCoeff& coeff) {
  const double t1 = next_time();
  const double t0 = ens_.t;
  const int sub = cfg_.substeps;
  const int m = params_.factor_count;
  const int n_tenors = ens_.tenors;
  const double dt = (t1 - t0) / sub;

  std::vector<SubstepPlan> plans(static_cast<std::size_t>(sub));
  for (int s = 0; s < sub; ++s) {
    auto& plan = plans[s];
    plan.ta = (s == 0) ? t0 : t0 + s * dt;
    const double tb = (s == sub - 1) ? t1 : t0 + (s + 1) * dt;
    plan.dt = tb - plan.ta;
    plan.sqrt_dt = std::sqrt(plan.dt);
    const OuStep os = ou_step(g_, plan.ta, tb);
    plan.decay = os.decay;
    plan.sqrt_var = std::sqrt(std::max(os.var, 0.0));
    plan.phi_int = shift_.integral(plan.ta, tb);
    plan.step_index = step_count_ + static_cast<std::uint64_t>(s);
    plan.active.resize(n_tenors);
    plan.nu.resize(n_tenors);
    plan.zeta.resize(n_tenors);
    plan.lam.assign(static_cast<std::size_t>(n_tenors) * m, 0.0);
    for (int i = 0; i < n_tenors; ++i) {
      plan.active[i] = resets_[i] > plan.ta + 1e-12;
      if (!plan.active[i]) continue;
      plan.nu[i] = nu(params_, rc_, g_, pays_[i], resets_[i], plan.ta);
      double zz = 0.0;
      for (int alpha = 1; alpha <= m; ++alpha) {
        const double lv = loading(params_, alpha, resets_[i], plan.ta);
        plan.lam[static_cast<std::size_t>(i) * m + (alpha - 1)] = lv;
        zz += lv * lv;
      }
      plan.zeta[i] = zz;
    }
  }

  const int workers = std::min<int>(cfg_.workers, static_cast<int>(ens_.n_paths));
  if (workers <= 1) {
    run_paths(plans, coeff, 0, ens_.n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ens_.n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(ens_.n_paths, w * chunk);
      const std::size_t hi = std::min(ens_.n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([this, &plans, &coeff, lo, hi] { run_paths(plans, coeff, lo, hi); });
    }
    for (auto& th : pool) th.join();
  }

  step_count_ += static_cast<std::uint64_t>(sub);
  ens_.t = t1;
  ++slice_;
}

void Simulator::advance_to(double t, const DiffusionCoeff& coeff) {
  if (t <= ens_.t + 1e-12) throw ValidationError("simulator: advance target not ahead");
  while (!done() && cfg_.grid[slice_] <= t + 1e-9) advance_slice(coeff);
  if (std::abs(ens_.t - t) > 1e-9)
    throw ValidationError("simulator: advance target is not a grid time");
}

double Simulator::invalid_fraction() const {
  return static_cast<double>(ens_.invalid_count()) / static_cast<double>(ens_.n_paths);
}

void Simulator::ensure_health() const {
  if (invalid_fraction() > 0.001)
    throw NumericalError("mc: more than 0.1% of paths went non-finite");
}

const McRun::Capture& McRun::at_reset(int tenor) const {
  if (tenor < 0 || static_cast<std::size_t>(tenor) >= captures.size() ||
      !captures[static_cast<std::size_t>(tenor)].present())
    throw ValidationError("mc: no capture for the requested tenor (grid missing its reset)");
  return captures[static_cast<std::size_t>(tenor)];
}

McRun simulate_to_resets(Simulator& sim, const DiffusionCoeff& coeff) {
  McRun run;
  run.n_paths = sim.config().n_paths;
  run.antithetic = sim.config().antithetic;
  run.captures.resize(sim.resets().size());

  while (!sim.done()) {
    sim.advance_slice(coeff);
    const auto& ens = sim.state();
    for (std::size_t i = 0; i < sim.resets().size(); ++i) {
      if (std::abs(sim.resets()[i] - ens.t) > 1e-9) continue;
      auto& cap = run.captures[i];
      cap.reset = sim.resets()[i];
      cap.x = ens.x;
      cap.log_d = ens.log_d;
      cap.log_f.resize(ens.n_paths);
      for (std::size_t pth = 0; pth < ens.n_paths; ++pth)
        cap.log_f[pth] = ens.log_f_at(pth, static_cast<int>(i));
    }
  }
  sim.ensure_health();
  run.valid = sim.state().valid;
  return run;
}

PriceQuote reduce_payoffs(const std::vector<double>& payoff,
                          const std::vector<std::uint8_t>& valid, bool antithetic) {
  if (payoff.size() != valid.size()) throw ValidationError("mc: payoff/validity size mismatch");
  std::vector<double> samples;
  samples.reserve(payoff.size());
  if (antithetic) {
    if (payoff.size() % 2 != 0) throw ValidationError("mc: odd path count with antithetic pairs");
    for (std::size_t mth = 0; mth * 2 < payoff.size(); ++mth)
      if (valid[2 * mth] && valid[2 * mth + 1])
        samples.push_back(0.5 * (payoff[2 * mth] + payoff[2 * mth + 1]));
  } else {
    for (std::size_t pth = 0; pth < payoff.size(); ++pth)
      if (valid[pth]) samples.push_back(payoff[pth]);
  }
  if (samples.size() < 2) throw NumericalError("mc: fewer than 2 valid samples");

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(samples.size());
  return PriceQuote{mean, std::sqrt(ss / (n - 1.0) / n)};
}

namespace {

double payoff_of(OptionKind kind, double fwd, double strike) {
  if (kind == OptionKind::Swap) return fwd - strike;
  if (kind == OptionKind::Cap) return std::max(fwd - strike, 0.0);
  return std::max(strike - fwd, 0.0);
}

}  // namespace

PriceQuote price_zc_option_mc(const ZcInstrument& inst, int tenor, const McRun& run,
                              const G1ppParams& g, const ShiftFunction& shift) {
  const auto& cap = run.at_reset(tenor);
  if (std::abs(cap.reset - inst.reset) > 1e-9)
    throw ValidationError("mc: instrument reset differs from the captured tenor");
  const BondCoeffs bc = bond_coeffs(g, shift, inst.reset, inst.pay);
  const double strike = inst.strike();
  std::vector<double> payoff(run.n_paths);
  for (std::size_t pth = 0; pth < run.n_paths; ++pth) {
    const double disc = std::exp(cap.log_d[pth]) * bc.price(cap.x[pth]);
    payoff[pth] = inst.notional * disc * payoff_of(inst.kind, std::exp(cap.log_f[pth]), strike);
  }
  return reduce_payoffs(payoff, run.valid, run.antithetic);
}

PriceQuote price_yoy_option_mc(const YoyInstrument& inst, int tenor_i, int tenor_j,
                               const McRun& run, const G1ppParams& g, const ShiftFunction& shift) {
  const auto& ci = run.at_reset(tenor_i);
  const auto& cj = run.at_reset(tenor_j);
  if (std::abs(ci.reset - inst.reset_a) > 1e-9 || std::abs(cj.reset - inst.reset_b) > 1e-9)
    throw ValidationError("mc: instrument resets differ from the captured tenors");
  if (!(ci.reset < cj.reset)) throw ValidationError("mc: yoy needs ordered resets");
  const BondCoeffs bc = bond_coeffs(g, shift, inst.reset_b, inst.pay);
  const double strike = inst.strike();
  std::vector<double> payoff(run.n_paths);
  for (std::size_t pth = 0; pth < run.n_paths; ++pth) {
    const double disc = std::exp(cj.log_d[pth]) * bc.price(cj.x[pth]);
    const double ratio = std::exp(cj.log_f[pth] - ci.log_f[pth]);
    payoff[pth] = inst.notional * disc * payoff_of(inst.kind, ratio, strike);
  }
  return reduce_payoffs(payoff, run.valid, run.antithetic);
}

}  // namespace ifm
