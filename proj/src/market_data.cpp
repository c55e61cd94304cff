#include "ifm/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ifm/errors.hpp"
#include "io_util.hpp"

namespace ifm {

DiscountCurve DiscountCurve::from_pillars(std::vector<double> times, std::vector<double> dfs) {
  if (times.size() != dfs.size() || times.size() < 2)
    throw ValidationError("discount curve: need at least two pillars");
  if (times.front() != 0.0 || dfs.front() != 1.0)
    throw ValidationError("discount curve: first pillar must be (0, 1)");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]))
      throw ValidationError("discount curve: pillar times must increase strictly");
    if (!(dfs[i] > 0.0)) throw ValidationError("discount curve: discount factors must be positive");
  }
  DiscountCurve c;
  c.times_ = std::move(times);
  c.dfs_ = std::move(dfs);
  c.log_dfs_.resize(c.dfs_.size());
  for (std::size_t i = 0; i < c.dfs_.size(); ++i) c.log_dfs_[i] = std::log(c.dfs_[i]);
  return c;
}

double DiscountCurve::discount(double t) const {
  if (times_.empty()) throw ValidationError("discount curve: empty");
  if (t < 0.0 || t > times_.back() + 1e-12)
    throw ValidationError("discount curve: time outside pillar range");
  t = std::min(t, times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return dfs_.back();
  const std::size_t k = static_cast<std::size_t>(it - times_.begin());
  if (k == 0) return 1.0;
  const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
  return std::exp(log_dfs_[k - 1] + w * (log_dfs_[k] - log_dfs_[k - 1]));
}

double DiscountCurve::instantaneous_forward(double t) const {
  if (times_.empty()) throw ValidationError("discount curve: empty");
  if (t < 0.0 || t > times_.back())
    throw ValidationError("discount curve: forward time outside [0, last pillar]");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - times_.begin());
  if (k == times_.size()) --k;  // closed at the last pillar
  return -(log_dfs_[k] - log_dfs_[k - 1]) / (times_[k] - times_[k - 1]);
}

double VolTenor::strike_for(double kbar) const {
  return fwd_cpi * std::pow(1.0 + kbar, reset);
}

namespace {

void check_strike_band(const VolTenor& t, double strike) {
  if (strike < 0.5 * t.strikes.front() || strike > 1.5 * t.strikes.back())
    throw ValidationError("vol smile: strike far outside quoted range");
}

}  // namespace

double VolTenor::vol_at(double strike) const {
  check_strike_band(*this, strike);
  return smile.value(strike);
}

double VolTenor::dvol_dk(double strike) const {
  check_strike_band(*this, strike);
  return smile.deriv(strike);
}

double VolTenor::d2vol_dk2(double strike) const {
  check_strike_band(*this, strike);
  return smile.deriv2(strike);
}

CpiVolSurface CpiVolSurface::from_tenors(std::vector<VolTenor> tenors, double ref_index) {
  if (tenors.empty()) throw ValidationError("vol surface: no tenors");
  std::sort(tenors.begin(), tenors.end(),
            [](const VolTenor& a, const VolTenor& b) { return a.reset < b.reset; });
  for (std::size_t i = 0; i < tenors.size(); ++i) {
    VolTenor& t = tenors[i];
    if (i > 0 && !(t.reset > tenors[i - 1].reset + 1e-12))
      throw ValidationError("vol surface: duplicate tenor reset");
    if (!(t.reset > 0.0)) throw ValidationError("vol surface: reset must be positive");
    if (t.pay < t.reset - 1e-12) throw ValidationError("vol surface: pay date before reset");
    if (!(t.fwd_cpi > 0.0)) throw ValidationError("vol surface: forward CPI must be positive");
    if (t.strikes.empty()) throw ValidationError("vol surface: empty smile");
    for (std::size_t k = 0; k < t.strikes.size(); ++k) {
      if (!(t.vols[k] > 0.0)) throw ValidationError("vol surface: vols must be positive");
      if (k > 0 && !(t.strikes[k] > t.strikes[k - 1]))
        throw ValidationError("vol surface: strikes must increase strictly");
    }
    t.smile = num::Pchip::build(t.strikes, t.vols);
  }
  CpiVolSurface s;
  s.tenors_ = std::move(tenors);
  s.ref_index_ = ref_index;
  return s;
}

const VolTenor& CpiVolSurface::tenor(int i) const {
  if (i < 0 || i >= size()) throw ValidationError("vol surface: tenor index out of range");
  return tenors_[static_cast<std::size_t>(i)];
}

int CpiVolSurface::index_of_reset(double reset) const {
  for (int i = 0; i < size(); ++i)
    if (std::abs(tenors_[static_cast<std::size_t>(i)].reset - reset) < 1e-9) return i;
  return -1;
}

TotalVariance total_variance(const CpiVolSurface& surface, int tenor, double y, double t) {
  const VolTenor& vt = surface.tenor(tenor);
  if (!(t > 0.0) || t > vt.reset + 1e-9)
    throw ValidationError("total variance: time must be in (0, T_i]");
  const double strike = vt.fwd_cpi * std::exp(y);
  const double v = vt.vol_at(strike);
  const double v1 = vt.dvol_dk(strike);
  const double v2 = vt.d2vol_dk2(strike);
  // dK/dy = K, so vol partials in y follow from the strike partials.
  const double vy = v1 * strike;
  const double vyy = v2 * strike * strike + v1 * strike;
  TotalVariance out;
  out.w = v * v * t;
  out.d_t = v * v;
  out.d_y = 2.0 * v * vy * t;
  out.d_yy = 2.0 * t * (vy * vy + v * vyy);
  return out;
}

HistoricalSeries HistoricalSeries::from_rows(std::vector<std::string> dates,
                                             std::vector<double> buckets,
                                             std::vector<double> log_f) {
  if (dates.empty() || buckets.empty()) throw ValidationError("history: empty series");
  if (log_f.size() != dates.size() * buckets.size())
    throw ValidationError("history: ragged data");
  for (std::size_t i = 1; i < dates.size(); ++i)
    if (!(dates[i] > dates[i - 1]))
      throw ValidationError("history: dates must increase strictly");
  for (std::size_t i = 1; i < buckets.size(); ++i)
    if (!(buckets[i] > buckets[i - 1]))
      throw ValidationError("history: buckets must increase strictly");
  HistoricalSeries h;
  h.dates_ = std::move(dates);
  h.buckets_ = std::move(buckets);
  h.log_f_ = std::move(log_f);
  return h;
}

DiscountCurve load_discounts(const std::string& path) {
  auto rows = io::read_csv(path, "T,df");
  std::vector<double> times, dfs;
  for (const auto& [ln, fields] : rows) {
    if (fields.size() != 2)
      throw ValidationError(path + ":" + std::to_string(ln) + ": expected 2 fields");
    times.push_back(io::parse_double(fields[0], path, ln));
    dfs.push_back(io::parse_double(fields[1], path, ln));
  }
  try {
    return DiscountCurve::from_pillars(std::move(times), std::move(dfs));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

CpiVolSurface load_cpi_vols(const std::string& path, double ref_index) {
  auto rows = io::read_csv(path, "Ti,Ti_tilde,F0,Kbar,sigma");
  std::map<double, VolTenor> by_reset;
  for (const auto& [ln, fields] : rows) {
    if (fields.size() != 5)
      throw ValidationError(path + ":" + std::to_string(ln) + ": expected 5 fields");
    const double ti = io::parse_double(fields[0], path, ln);
    const double pay = io::parse_double(fields[1], path, ln);
    const double f0 = io::parse_double(fields[2], path, ln);
    const double kbar = io::parse_double(fields[3], path, ln);
    const double sigma = io::parse_double(fields[4], path, ln);
    VolTenor& t = by_reset[ti];
    if (t.kbars.empty()) {
      t.reset = ti;
      t.pay = pay;
      t.fwd_cpi = f0;
    } else if (std::abs(t.pay - pay) > 1e-12 || std::abs(t.fwd_cpi - f0) > 1e-12) {
      throw ValidationError(path + ":" + std::to_string(ln) +
                            ": inconsistent pay date or forward for tenor");
    }
    if (std::abs(kbar) >= 1.0)
      throw ValidationError(path + ":" + std::to_string(ln) + ": Kbar out of range");
    t.kbars.push_back(kbar);
    t.strikes.push_back(f0 * std::pow(1.0 + kbar, ti));
    t.vols.push_back(sigma);
  }
  std::vector<VolTenor> tenors;
  tenors.reserve(by_reset.size());
  for (auto& [ti, t] : by_reset) tenors.push_back(std::move(t));
  try {
    return CpiVolSurface::from_tenors(std::move(tenors), ref_index);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

HistoricalSeries load_history(const std::string& path) {
  auto rows = io::read_csv(path, "date,bucket,logF");
  std::vector<double> buckets;
  std::vector<std::string> dates;
  std::map<std::string, std::map<double, double>> by_date;
  for (const auto& [ln, fields] : rows) {
    if (fields.size() != 3)
      throw ValidationError(path + ":" + std::to_string(ln) + ": expected 3 fields");
    std::string date = fields[0];
    const double bucket = io::parse_double(fields[1], path, ln);
    const double logf = io::parse_double(fields[2], path, ln);
    auto& row = by_date[date];
    if (row.count(bucket))
      throw ValidationError(path + ":" + std::to_string(ln) + ": duplicate (date, bucket)");
    row[bucket] = logf;
  }
  if (by_date.empty()) throw ValidationError(path + ": no data rows");
  std::map<double, int> bucket_set;
  for (const auto& [date, row] : by_date)
    for (const auto& [b, v] : row) bucket_set[b] = 0;
  for (const auto& [b, dummy] : bucket_set) buckets.push_back(b);

  // Forward-fill gaps of at most three consecutive rows per bucket; rows with
  // older gaps are dropped.
  std::vector<double> data;
  std::map<double, std::pair<double, int>> last_seen;  // bucket -> (value, rows since seen)
  for (const auto& [date, row] : by_date) {
    std::vector<double> filled(buckets.size());
    bool ok = true;
    for (std::size_t c = 0; c < buckets.size(); ++c) {
      auto it = row.find(buckets[c]);
      if (it != row.end()) {
        last_seen[buckets[c]] = {it->second, 0};
      } else if (auto seen = last_seen.find(buckets[c]); seen != last_seen.end()) {
        ++seen->second.second;
      }
      auto seen = last_seen.find(buckets[c]);
      if (seen != last_seen.end() && seen->second.second <= 3)
        filled[c] = seen->second.first;
      else
        ok = false;
    }
    if (!ok) continue;
    dates.push_back(date);
    data.insert(data.end(), filled.begin(), filled.end());
  }
  return HistoricalSeries::from_rows(std::move(dates), std::move(buckets), std::move(data));
}

void save_discounts(const std::string& path, const DiscountCurve& curve) {
  auto out = io::open_out(path);
  out << "T,df\n";
  for (std::size_t i = 0; i < curve.times().size(); ++i)
    out << io::format_double(curve.times()[i]) << "," << io::format_double(curve.dfs()[i]) << "\n";
}

void save_cpi_vols(const std::string& path, const CpiVolSurface& surface) {
  auto out = io::open_out(path);
  out << "Ti,Ti_tilde,F0,Kbar,sigma\n";
  for (int i = 0; i < surface.size(); ++i) {
    const VolTenor& t = surface.tenor(i);
    for (std::size_t k = 0; k < t.kbars.size(); ++k)
      out << io::format_double(t.reset) << "," << io::format_double(t.pay) << ","
          << io::format_double(t.fwd_cpi) << "," << io::format_double(t.kbars[k]) << ","
          << io::format_double(t.vols[k]) << "\n";
  }
}

void save_history(const std::string& path, const HistoricalSeries& series) {
  auto out = io::open_out(path);
  out << "date,bucket,logF\n";
  for (std::size_t r = 0; r < series.rows(); ++r)
    for (std::size_t c = 0; c < series.cols(); ++c)
      out << series.dates()[r] << "," << io::format_double(series.buckets()[c]) << ","
          << io::format_double(series.at(r, c)) << "\n";
}

}  // namespace ifm
