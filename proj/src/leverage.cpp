#include "ifm/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "io_util.hpp"
#include "ifm/errors.hpp"
#include "ifm/num.hpp"

namespace ifm {

std::vector<double> LeverageGrid::kbars() const {
  if (!(kbar_step > 0.0) || !(kbar_hi > kbar_lo))
    throw ValidationError("leverage grid: bad strike range");
  const int n = static_cast<int>(std::lround((kbar_hi - kbar_lo) / kbar_step)) + 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kbar_lo + i * kbar_step;
  return out;
}

std::vector<double> LeverageGrid::y_nodes(double reset) const {
  if (!(reset > 0.0)) throw ValidationError("leverage grid: reset must be positive");
  std::vector<double> out = kbars();
  for (double& k : out) k = reset * std::log1p(k);
  return out;
}

LeverageSurface::LeverageSurface(std::vector<std::vector<double>> y_grids)
    : y_(std::move(y_grids)) {
  if (y_.empty()) throw ValidationError("leverage surface: no tenors");
  for (const auto& grid : y_) {
    if (grid.size() < 2) throw ValidationError("leverage surface: strike grid too small");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw ValidationError("leverage surface: strike grid not increasing");
  }
  values_.resize(y_.size());
}

const std::vector<double>& LeverageSurface::y_grid(int tenor) const {
  return y_.at(static_cast<std::size_t>(tenor));
}

double LeverageSurface::node(int tenor, int slice, int iy) const {
  const auto& grid = y_grid(tenor);
  return values_.at(static_cast<std::size_t>(tenor))
      .at(static_cast<std::size_t>(slice) * grid.size() + static_cast<std::size_t>(iy));
}

void LeverageSurface::push_slice(double t, const std::vector<std::vector<double>>& rows) {
  if (!times_.empty() && !(t > times_.back()))
    throw ValidationError("leverage surface: slice times must increase");
  if (rows.size() != y_.size()) throw ValidationError("leverage surface: tenor count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != y_[i].size())
      throw ValidationError("leverage surface: slice row size mismatch");
    for (double v : rows[i])
      if (!std::isfinite(v) || !(v > 0.0))
        throw ValidationError("leverage surface: values must be finite and positive");
  }
  times_.push_back(t);
  for (std::size_t i = 0; i < rows.size(); ++i)
    values_[i].insert(values_[i].end(), rows[i].begin(), rows[i].end());
}

namespace {

// index of the left node and the linear weight of the right one, flat-clamped
void locate(const std::vector<double>& grid, double v, std::size_t& k, double& wr) {
  if (v <= grid.front()) {
    k = 0;
    wr = 0.0;
    return;
  }
  if (v >= grid.back()) {
    k = grid.size() - 2;
    wr = 1.0;
    return;
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), v);
  k = static_cast<std::size_t>(it - grid.begin()) - 1;
  wr = (v - grid[k]) / (grid[k + 1] - grid[k]);
}

}  // namespace

double LeverageSurface::slice_value(int tenor, int slice, double y) const {
  const auto& grid = y_grid(tenor);
  const auto& vals = values_.at(static_cast<std::size_t>(tenor));
  if (slice < 0 || slice >= slice_count())
    throw ValidationError("leverage surface: slice out of range");
  const std::size_t base = static_cast<std::size_t>(slice) * grid.size();
  std::size_t k = 0;
  double wr = 0.0;
  locate(grid, y, k, wr);
  return (1.0 - wr) * vals[base + k] + wr * vals[base + k + 1];
}

double LeverageSurface::value(int tenor, double y, double t) const {
  if (times_.empty()) throw ValidationError("leverage surface: empty");
  if (times_.size() == 1 || t <= times_.front()) return slice_value(tenor, 0, y);
  if (t >= times_.back()) return slice_value(tenor, slice_count() - 1, y);
  std::size_t k = 0;
  double wr = 0.0;
  locate(times_, t, k, wr);
  return (1.0 - wr) * slice_value(tenor, static_cast<int>(k), y) +
         wr * slice_value(tenor, static_cast<int>(k) + 1, y);
}

LeverageSurface load_leverage(const std::string& path) {
  const auto rows = io::read_csv(path, "tenor,y,t,L");
  // tenor -> slice time -> nodes in file order
  std::map<int, std::map<double, std::vector<std::pair<double, double>>>> data;
  for (const auto& [line, fields] : rows) {
    const int tenor = static_cast<int>(io::parse_double(fields[0], path, line));
    const double y = io::parse_double(fields[1], path, line);
    const double t = io::parse_double(fields[2], path, line);
    const double l = io::parse_double(fields[3], path, line);
    data[tenor][t].push_back({y, l});
  }
  if (data.empty()) throw ValidationError(path + ": no leverage rows");

  std::vector<std::vector<double>> y_grids;
  int expect = 0;
  for (const auto& [tenor, slices] : data) {
    if (tenor != expect++) throw ValidationError(path + ": tenor indices must be 0,1,...");
    std::vector<double> grid;
    for (const auto& [y, l] : slices.begin()->second) grid.push_back(y);
    y_grids.push_back(std::move(grid));
  }
  LeverageSurface surface(std::move(y_grids));

  const auto& times = data.begin()->second;
  for (const auto& [t, nodes] : times) {
    std::vector<std::vector<double>> rows_at;
    for (const auto& [tenor, slices] : data) {
      auto it = slices.find(t);
      if (it == slices.end()) throw ValidationError(path + ": slice times differ across tenors");
      std::vector<double> vals;
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (std::abs(it->second[i].first - surface.y_grid(tenor)[i]) > 1e-12)
          throw ValidationError(path + ": strike grid differs across slices");
        vals.push_back(it->second[i].second);
      }
      rows_at.push_back(std::move(vals));
    }
    surface.push_slice(t, rows_at);
  }
  return surface;
}

void save_leverage(const std::string& path, const LeverageSurface& surface) {
  auto out = io::open_out(path);
  out << "tenor,y,t,L\n";
  for (int i = 0; i < surface.tenor_count(); ++i)
    for (int k = 0; k < surface.slice_count(); ++k)
      for (std::size_t iy = 0; iy < surface.y_grid(i).size(); ++iy)
        out << i << ',' << io::format_double(surface.y_grid(i)[iy]) << ','
            << io::format_double(surface.slice_times()[static_cast<std::size_t>(k)]) << ','
            << io::format_double(surface.node(i, k, static_cast<int>(iy))) << '\n';
}

LeverageCoeff::LeverageCoeff(const LeverageSurface& surface, std::vector<double> fwd_cpis,
                             Mode mode)
    : surface_(&surface), f0_(std::move(fwd_cpis)), mode_(mode) {
  if (static_cast<int>(f0_.size()) != surface.tenor_count())
    throw ValidationError("leverage coefficient: forward count mismatch");
  for (double f : f0_)
    if (!(f > 0.0)) throw ValidationError("leverage coefficient: forwards must be positive");
}

double LeverageCoeff::value(int tenor, double f, double t) const {
  const double y = std::log(f / f0_[static_cast<std::size_t>(tenor)]);
  if (mode_ == Mode::latest_slice)
    return surface_->slice_value(tenor, surface_->slice_count() - 1, y);
  return surface_->value(tenor, y, t);
}

int LeverageReport::total(int Slice::*field) const {
  int acc = 0;
  for (const auto& s : slices) acc += s.*field;
  return acc;
}

std::vector<double> slice_calibrate(const DiscountCurve& curve, const CpiVolSurface& vols,
                                    const FactorParams& p, int tenor,
                                    const std::vector<double>& y, double t,
                                    const std::vector<double>* theta,
                                    const std::vector<double>* prev, double notional,
                                    LeverageReport::Slice* counters) {
  const auto& ten = vols.tenor(tenor);
  if (theta && theta->size() != y.size())
    throw ValidationError("leverage: theta grid size mismatch");
  if (prev && prev->size() != y.size())
    throw ValidationError("leverage: previous slice size mismatch");
  const double z = zeta(p, ten.reset, ten.reset, t);
  const double t_var = std::min(t, ten.reset);
  const double df_pay = curve.discount(ten.pay);

  std::vector<double> out(y.size());
  for (std::size_t iy = 0; iy < y.size(); ++iy) {
    const TotalVariance tv = total_variance(vols, tenor, y[iy], t_var);
    if (!(tv.d_t > 0.0)) throw NumericalError("leverage: non-positive dw/dT");
    const double w = tv.w;
    double bracket = 1.0 - (y[iy] / w) * tv.d_y + 0.5 * tv.d_yy +
                     0.25 * tv.d_y * tv.d_y * (-0.25 - 1.0 / w + y[iy] * y[iy] / (w * w));
    if (bracket < 1e-4) {
      bracket = 1e-4;
      if (counters) ++counters->bracket_floors;
    }

    double l2;
    if (!theta) {
      l2 = tv.d_t / (bracket * z);
    } else {
      const double sq = std::sqrt(w);
      const double d2 = -y[iy] / sq - 0.5 * sq;
      const double dwp =
          0.5 * notional * df_pay * ten.fwd_cpi * std::exp(y[iy]) * num::norm_pdf(d2) / sq;
      if (dwp < 1e-250) {
        // Price gradient underflowed at the far wing: the theta correction is
        // numerically meaningless there, keep the deterministic-rate form.
        l2 = tv.d_t / (bracket * z);
        if (counters) ++counters->gradient_fallbacks;
      } else {
        l2 = (dwp * tv.d_t + (*theta)[iy]) / (dwp * bracket * z);
      }
    }

    if (!(l2 > 0.0)) {
      if (!prev) throw NumericalError("leverage: non-positive first-slice value");
      out[iy] = 0.1 * (*prev)[iy];
      if (counters) ++counters->negative_floors;
      continue;
    }
    out[iy] = std::sqrt(l2);
  }
  return out;
}

std::vector<std::vector<double>> first_slice(const DiscountCurve& curve,
                                             const CpiVolSurface& vols, const FactorParams& p,
                                             double t1, const LeverageGrid& grid,
                                             LeverageReport::Slice* counters) {
  if (!(t1 > 0.0)) throw ValidationError("leverage: first slice time must be positive");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < vols.size(); ++i) {
    const auto& ten = vols.tenor(static_cast<int>(i));
    if (t1 > ten.reset + 1e-9)
      throw ValidationError("leverage: first slice time beyond a quoted reset");
    rows.push_back(slice_calibrate(curve, vols, p, static_cast<int>(i),
                                   grid.y_nodes(ten.reset), t1, nullptr, nullptr, 1.0, counters));
  }
  return rows;
}

ThetaEstimate theta_estimate(OptionKind kind, const Simulator& sim, int tenor, double strike,
                             const DiscountCurve& curve, const CpiVolSurface& vols,
                             const DiffusionCoeff& coeff, double notional) {
  if (kind == OptionKind::Swap) throw ValidationError("theta: cap or floor only");
  const auto& ens = sim.state();
  const double t = ens.t;
  const auto& ten = vols.tenor(tenor);
  const double y = std::log(strike / ten.fwd_cpi);
  const TotalVariance tv = total_variance(vols, tenor, y, std::min(t, ten.reset));
  const double market =
      notional * curve.discount(ten.pay) * black_option(kind, ten.fwd_cpi, strike, tv.w);
  const double fwd_rate = curve.instantaneous_forward(t);
  const double phi_t = sim.shift().at(t);
  const BondCoeffs stub = bond_coeffs(sim.rates(), sim.shift(), t, ten.pay);
  const double nu_t =
      nu(sim.factor_params(), sim.correlations(), sim.rates(), ten.pay, ten.reset, t);

  std::vector<double> samples(ens.n_paths, 0.0);
  for (std::size_t pth = 0; pth < ens.n_paths; ++pth) {
    if (!ens.valid[pth]) continue;
    const double f = std::exp(ens.log_f_at(pth, tenor));
    const bool in = (kind == OptionKind::Cap) ? f > strike : f < strike;
    if (!in) continue;
    const double disc = std::exp(ens.log_d[pth]) * stub.price(ens.x[pth]);
    const double rate = ens.x[pth] + phi_t;
    const double lev = coeff.value(tenor, f, t);
    const double core = (kind == OptionKind::Cap)
                            ? (f - strike) * rate - nu_t * lev * f
                            : (strike - f) * rate + nu_t * lev * f;
    samples[pth] = notional * disc * core;
  }
  const PriceQuote q = reduce_payoffs(samples, ens.valid, sim.config().antithetic);
  return ThetaEstimate{q.value - fwd_rate * market, q.std_error};
}

LeverageSurface calibrate_leverage(const DiscountCurve& curve, const CpiVolSurface& vols,
                                   const FactorParams& p, const RateCorrelations&,
                                   const G1ppParams&, const ShiftFunction&, const McConfig& cfg,
                                   const LeverageGrid& grid, double notional,
                                   LeverageReport* report) {
  cfg.validate();
  std::vector<std::vector<double>> y_grids;
  for (std::size_t i = 0; i < vols.size(); ++i)
    y_grids.push_back(grid.y_nodes(vols.tenor(static_cast<int>(i)).reset));
  LeverageSurface surface(std::move(y_grids));

  LeverageReport::Slice counters;
  counters.t = cfg.grid.front();
  surface.push_slice(cfg.grid.front(), first_slice(curve, vols, p, cfg.grid.front(), grid,
                                                   &counters));
  if (report) report->slices.push_back(counters);

  // The slice options pay at each tenor's fixed pay date. Deflated to that
  // date, the payoff's rate-coupling drift cancels against the discount-bond /
  // forward covariance, so the total-implied-variance Dupire equation holds
  // with no correction term and every slice solves in closed form. (A theta
  // correction only arises when the pay date rolls with the slice time.)
  for (std::size_t k = 1; k < cfg.grid.size(); ++k) {
    const double tk = cfg.grid[k];
    LeverageReport::Slice row;
    row.t = tk;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < vols.size(); ++i) {
      const auto& ten = vols.tenor(static_cast<int>(i));
      const auto& ys = surface.y_grid(static_cast<int>(i));
      if (tk > ten.reset + 1e-9) {
        const int last = surface.slice_count() - 1;
        std::vector<double> prev(ys.size());
        for (std::size_t iy = 0; iy < ys.size(); ++iy)
          prev[iy] = surface.node(static_cast<int>(i), last, static_cast<int>(iy));
        rows.push_back(std::move(prev));  // frozen underlier: constant in t
        continue;
      }
      rows.push_back(slice_calibrate(curve, vols, p, static_cast<int>(i), ys, tk, nullptr,
                                     nullptr, notional, &row));
    }
    surface.push_slice(tk, rows);
    if (report) report->slices.push_back(row);
  }
  return surface;
}

}  // namespace ifm
