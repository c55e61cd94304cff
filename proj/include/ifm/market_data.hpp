#pragma once

#include <string>
#include <vector>

#include "ifm/num.hpp"

namespace ifm {

// Zero-coupon discount curve, log-linear in the discount factor between
// pillars (piecewise-constant instantaneous forwards).
class DiscountCurve {
 public:
  DiscountCurve() = default;
  static DiscountCurve from_pillars(std::vector<double> times, std::vector<double> dfs);

  double discount(double t) const;
  // Right-continuous piecewise-constant forward on [0, last pillar], closed
  // at the right end with the final segment's value.
  double instantaneous_forward(double t) const;

  double last_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& dfs() const { return dfs_; }

 private:
  std::vector<double> times_;  // starts at 0
  std::vector<double> dfs_;    // starts at 1
  std::vector<double> log_dfs_;
};

// One quoted cap/floor smile: forward CPI F_i(0) for reset T_i paid at T_i~,
// implied vols by absolute strike K = F_i(0) * (1 + kbar)^T_i.
struct VolTenor {
  double reset = 0.0;    // T_i
  double pay = 0.0;      // T_i~ (>= reset)
  double fwd_cpi = 0.0;  // F_i(0)
  std::vector<double> kbars;
  std::vector<double> strikes;
  std::vector<double> vols;
  num::Pchip smile;  // vol as a function of absolute strike

  double strike_for(double kbar) const;
  double vol_at(double strike) const;
  double dvol_dk(double strike) const;
  double d2vol_dk2(double strike) const;
};

class CpiVolSurface {
 public:
  CpiVolSurface() = default;
  static CpiVolSurface from_tenors(std::vector<VolTenor> tenors, double ref_index);

  int size() const { return static_cast<int>(tenors_.size()); }
  const VolTenor& tenor(int i) const;
  int index_of_reset(double reset) const;  // -1 when absent
  double ref_index() const { return ref_index_; }

 private:
  std::vector<VolTenor> tenors_;
  double ref_index_ = 0.0;
};

// Total implied variance w(y, T) = vol(F0 e^y)^2 * T and its partials,
// y = log-moneyness against F_i(0). Time accrual is linear; the strike
// dimension differentiates the smile interpolant through the chain rule.
struct TotalVariance {
  double w = 0.0;
  double d_t = 0.0;
  double d_y = 0.0;
  double d_yy = 0.0;
};
TotalVariance total_variance(const CpiVolSurface& surface, int tenor, double y, double t);

// Daily history of log forward CPI by maturity bucket; rectangular after
// forward-filling gaps of up to three rows.
class HistoricalSeries {
 public:
  HistoricalSeries() = default;
  static HistoricalSeries from_rows(std::vector<std::string> dates, std::vector<double> buckets,
                                    std::vector<double> log_f);

  std::size_t rows() const { return dates_.size(); }
  std::size_t cols() const { return buckets_.size(); }
  double at(std::size_t r, std::size_t c) const { return log_f_[r * buckets_.size() + c]; }
  const std::vector<double>& buckets() const { return buckets_; }
  const std::vector<std::string>& dates() const { return dates_; }

 private:
  std::vector<std::string> dates_;
  std::vector<double> buckets_;
  std::vector<double> log_f_;  // rows x cols
};

struct MarketData {
  DiscountCurve curve;
  CpiVolSurface vols;
  HistoricalSeries history;  // optional; empty when not loaded
};

// CSV loaders/writers. Schemas:
//   discounts.csv  T,df
//   cpi_vols.csv   Ti,Ti_tilde,F0,Kbar,sigma
//   history.csv    date,bucket,logF
// Loaders validate strictly and report the offending file and line.
DiscountCurve load_discounts(const std::string& path);
CpiVolSurface load_cpi_vols(const std::string& path, double ref_index = 0.0);
HistoricalSeries load_history(const std::string& path);

void save_discounts(const std::string& path, const DiscountCurve& curve);
void save_cpi_vols(const std::string& path, const CpiVolSurface& surface);
void save_history(const std::string& path, const HistoricalSeries& series);

}  // namespace ifm
