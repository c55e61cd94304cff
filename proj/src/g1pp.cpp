#include "ifm/g1pp.hpp"

#include <algorithm>
#include <cmath>

#include "ifm/errors.hpp"
#include "ifm/num.hpp"
#include "io_util.hpp"

namespace ifm {

PiecewiseConstant::PiecewiseConstant(std::vector<double> ends, std::vector<double> values)
    : ends_(std::move(ends)), values_(std::move(values)) {
  if (ends_.size() != values_.size() || ends_.empty())
    throw ValidationError("piecewise constant: bad arrays");
  if (!(ends_.front() > 0.0))
    throw ValidationError("piecewise constant: breakpoints must be positive");
  for (std::size_t i = 1; i < ends_.size(); ++i)
    if (!(ends_[i] > ends_[i - 1]))
      throw ValidationError("piecewise constant: breakpoints must increase strictly");
}

PiecewiseConstant PiecewiseConstant::constant(double v) {
  return PiecewiseConstant({1.0}, {v});
}

double PiecewiseConstant::at(double t) const {
  auto it = std::upper_bound(ends_.begin(), ends_.end(), t);
  if (it == ends_.end()) return values_.back();
  return values_[static_cast<std::size_t>(it - ends_.begin())];
}

double PiecewiseConstant::integral(double t0, double t1) const {
  if (t1 < t0) throw ValidationError("piecewise constant: reversed integration range");
  double acc = 0.0;
  double lo = t0;
  std::size_t k = static_cast<std::size_t>(std::upper_bound(ends_.begin(), ends_.end(), t0) -
                                           ends_.begin());
  while (lo < t1) {
    const double hi = (k < ends_.size()) ? std::min(ends_[k], t1) : t1;
    acc += values_[std::min(k, values_.size() - 1)] * (hi - lo);
    lo = hi;
    ++k;
  }
  return acc;
}

G1ppParams G1ppParams::make(PiecewiseConstant a, PiecewiseConstant sigma) {
  for (double v : sigma.values())
    if (v < 0.0) throw ValidationError("g1pp: vol must be non-negative");
  return G1ppParams{std::move(a), std::move(sigma)};
}

double b_factor(const G1ppParams& g, double t, double T) {
  if (T < t) throw ValidationError("b_factor: T must be >= t");
  if (T == t) return 0.0;
  const auto pts = num::merged_breakpoints(t, T, {&g.mean_reversion.ends()});
  double b = 0.0;
  double decay = 1.0;  // exp(-int_t^{segment start} a)
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double dt = pts[k + 1] - pts[k];
    const double a = g.mean_reversion.at(pts[k]);
    const double seg = (a == 0.0) ? dt : (1.0 - std::exp(-a * dt)) / a;
    b += decay * seg;
    decay *= std::exp(-a * dt);
  }
  return b;
}

namespace {

// int_t^T (b(s, T) sigma_s)^2 ds by Gauss-Legendre on each breakpoint interval.
double b_sigma_sq_integral(const G1ppParams& g, double t, double T) {
  if (T <= t) return 0.0;
  const auto pts =
      num::merged_breakpoints(t, T, {&g.mean_reversion.ends(), &g.vol.ends()});
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    acc += num::gl_integrate(
        [&](double s) {
          const double bs = b_factor(g, s, T) * g.vol.at(s);
          return bs * bs;
        },
        pts[k], pts[k + 1], 16);
  }
  return acc;
}

}  // namespace

ShiftFunction calibrate_shift(const G1ppParams& g, const DiscountCurve& curve) {
  const auto& times = curve.times();
  std::vector<double> ends, phi;
  double prev_logp = 0.0;   // log P(0, T_{n-1})
  double prev_logpz = 0.0;  // log P^z(0, T_{n-1})
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double tn = times[n];
    const double logp = std::log(curve.discount(tn));
    const double logpz = 0.5 * b_sigma_sq_integral(g, 0.0, tn);
    const double dt = tn - times[n - 1];
    ends.push_back(tn);
    phi.push_back(((logpz - logp) - (prev_logpz - prev_logp)) / dt);
    prev_logp = logp;
    prev_logpz = logpz;
  }
  return ShiftFunction(std::move(ends), std::move(phi));
}

double pz_bond(const G1ppParams& g, double t, double x, double T) {
  if (T < t) throw ValidationError("pz_bond: T must be >= t");
  return std::exp(0.5 * b_sigma_sq_integral(g, t, T) - b_factor(g, t, T) * x);
}

double BondCoeffs::price(double x) const { return std::exp(log_det - b * x); }

BondCoeffs bond_coeffs(const G1ppParams& g, const ShiftFunction& shift, double t, double T) {
  if (T < t) throw ValidationError("bond_coeffs: T must be >= t");
  BondCoeffs c;
  c.log_det = -shift.integral(t, T) + 0.5 * b_sigma_sq_integral(g, t, T);
  c.b = b_factor(g, t, T);
  return c;
}

double zcb_price(const G1ppParams& g, const ShiftFunction& shift, double t, double x, double T) {
  return bond_coeffs(g, shift, t, T).price(x);
}

OuStep ou_step(const G1ppParams& g, double t0, double t1) {
  if (t1 < t0) throw ValidationError("ou_step: reversed interval");
  OuStep st;
  if (t1 == t0) return st;
  const auto pts =
      num::merged_breakpoints(t0, t1, {&g.mean_reversion.ends(), &g.vol.ends()});
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double dt = pts[k + 1] - pts[k];
    const double a = g.mean_reversion.at(pts[k]);
    const double s = g.vol.at(pts[k]);
    const double e2 = std::exp(-2.0 * a * dt);
    st.var = st.var * e2 + ((a == 0.0) ? s * s * dt : s * s * (1.0 - e2) / (2.0 * a));
    st.decay *= std::exp(-a * dt);
  }
  return st;
}

PiecewiseConstant load_g1pp_vol(const std::string& path) {
  auto rows = io::read_csv(path, "t,sigma_r");
  std::vector<double> ends, values;
  for (const auto& [ln, fields] : rows) {
    if (fields.size() != 2)
      throw ValidationError(path + ":" + std::to_string(ln) + ": expected 2 fields");
    ends.push_back(io::parse_double(fields[0], path, ln));
    values.push_back(io::parse_double(fields[1], path, ln));
  }
  try {
    PiecewiseConstant vol(std::move(ends), std::move(values));
    for (double v : vol.values())
      if (v < 0.0) throw ValidationError("vol must be non-negative");
    return vol;
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_g1pp_vol(const std::string& path, const PiecewiseConstant& vol) {
  auto out = io::open_out(path);
  out << "t,sigma_r\n";
  for (std::size_t i = 0; i < vol.ends().size(); ++i)
    out << io::format_double(vol.ends()[i]) << "," << io::format_double(vol.values()[i]) << "\n";
}

}  // namespace ifm
