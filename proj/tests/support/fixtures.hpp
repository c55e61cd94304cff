#pragma once

// Shared fixtures: the bundled market snapshot as in-memory objects, an
// independent quadrature oracle, and scratch-file helpers.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ifm/factors.hpp"
#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"

namespace fixtures {

inline ifm::DiscountCurve table_curve() {
  return ifm::DiscountCurve::from_pillars(
      {0, 1, 2, 5, 7, 10, 12, 15, 20},
      {1.0, 0.9656, 0.9379, 0.8706, 0.8264, 0.7596, 0.7152, 0.6547, 0.5800});
}

inline ifm::PiecewiseConstant table_rate_vol() {
  return ifm::PiecewiseConstant({1, 2, 3, 5, 10, 20},
                                {0.01071, 0.01093, 0.00992, 0.00839, 0.00686, 0.00683});
}

inline ifm::G1ppParams table_g1pp() {
  return ifm::G1ppParams::make(ifm::PiecewiseConstant::constant(0.02), table_rate_vol());
}

inline const std::vector<double>& table_tenors() {
  static const std::vector<double> v{1, 2, 5, 7, 10, 12, 15, 20};
  return v;
}

inline const std::vector<double>& table_fwd_cpi() {
  static const std::vector<double> v{124.43, 127.26, 136.30, 142.97,
                                     153.93, 162.04, 175.83, 201.50};
  return v;
}

inline const std::vector<double>& table_kbars() {
  static const std::vector<double> v{-0.02, -0.01, 0.00, 0.01, 0.02, 0.03, 0.04, 0.05};
  return v;
}

// Quoted smile grid, vols in decimals, row-major tenor x strike.
inline const std::vector<std::vector<double>>& table_vol_grid() {
  static const std::vector<std::vector<double>> v{
      {0.03101, 0.02756, 0.02442, 0.02189, 0.01974, 0.01839, 0.01841, 0.01969},
      {0.02523, 0.02242, 0.01987, 0.01781, 0.01409, 0.01293, 0.01587, 0.01971},
      {0.03620, 0.03218, 0.02851, 0.02556, 0.02243, 0.02415, 0.02915, 0.03471},
      {0.04152, 0.03691, 0.03270, 0.02931, 0.02755, 0.02986, 0.03466, 0.04005},
      {0.04991, 0.04437, 0.03931, 0.03523, 0.03493, 0.03789, 0.04273, 0.04817},
      {0.05494, 0.04884, 0.04327, 0.03878, 0.03929, 0.04253, 0.04735, 0.05273},
      {0.06043, 0.05371, 0.04759, 0.04265, 0.04393, 0.04735, 0.05206, 0.05729},
      {0.07102, 0.06313, 0.05593, 0.05013, 0.05203, 0.05548, 0.06008, 0.06525}};
  return v;
}

inline ifm::VolTenor make_tenor(double reset, double fwd, const std::vector<double>& kbars,
                                const std::vector<double>& vols) {
  ifm::VolTenor t;
  t.reset = reset;
  t.pay = reset;
  t.fwd_cpi = fwd;
  t.kbars = kbars;
  t.vols = vols;
  for (double kb : kbars) t.strikes.push_back(fwd * std::pow(1.0 + kb, reset));
  t.smile = ifm::num::Pchip::build(t.strikes, t.vols);
  return t;
}

inline ifm::CpiVolSurface table_vols() {
  std::vector<ifm::VolTenor> tenors;
  for (std::size_t i = 0; i < table_tenors().size(); ++i)
    tenors.push_back(
        make_tenor(table_tenors()[i], table_fwd_cpi()[i], table_kbars(), table_vol_grid()[i]));
  return ifm::CpiVolSurface::from_tenors(std::move(tenors), 100.0);
}

// Flat smile at one vol for each requested tenor (same strike grid shape).
inline ifm::CpiVolSurface flat_vols(const std::vector<double>& tenors,
                                    const std::vector<double>& fwds, double vol) {
  std::vector<ifm::VolTenor> out;
  for (std::size_t i = 0; i < tenors.size(); ++i)
    out.push_back(make_tenor(tenors[i], fwds[i], table_kbars(),
                             std::vector<double>(table_kbars().size(), vol)));
  return ifm::CpiVolSurface::from_tenors(std::move(out), 100.0);
}

inline ifm::FactorParams p2() { return ifm::FactorParams::two(-3.689, 3.553, 0.042); }
inline ifm::FactorParams p3() {
  return ifm::FactorParams::three(2.319, -2.068, 0.275, -0.145, 0.085, 0.142);
}

// Adaptive Simpson quadrature, independent of the library's Gauss-Legendre.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Unique scratch path, removed on destruction.
class TmpFile {
 public:
  explicit TmpFile(const std::string& stem) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "." + std::to_string(::getpid()) + "." + std::to_string(counter++)))
                .string();
  }
  ~TmpFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace fixtures
