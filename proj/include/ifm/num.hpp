#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ifm::num {

inline constexpr double pi = 3.14159265358979323846;

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse standard normal CDF (Wichura's AS241, double precision).
double norm_ppf(double p);

// Gauss-Legendre abscissas/weights on [-1, 1], computed once per order.
struct GlRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GlRule& gl_rule(int n);

template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
  const GlRule& r = gl_rule(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mid + half * r.x[i]);
  return acc * half;
}

// Sorted union of {a, b} and the interior points of each list that fall in (a, b).
std::vector<double> merged_breakpoints(double a, double b,
                                       const std::vector<const std::vector<double>*>& lists);

// Monotone-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
// Flat beyond the end knots: value clamps, derivatives vanish.
class Pchip {
 public:
  Pchip() = default;
  static Pchip build(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  const std::vector<double>& knots() const { return x_; }

 private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, m_;
};

// Cholesky factor of a symmetric PSD matrix (row-major n*n). Tolerates
// semi-definite pivots (clamped to zero); throws NumericalError when a pivot
// is negative beyond tolerance.
std::vector<double> cholesky_lower_psd(const std::vector<double>& a, int n, double tol = 1e-10);

// --- counter-based random streams -----------------------------------------
//
// Every draw is a pure function of (seed, path, step, dim), so results do not
// depend on scheduling or on how paths are split across workers.

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t stream_word(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                 std::uint64_t dim) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = hash_combine(h, path);
  h = hash_combine(h, step);
  h = hash_combine(h, dim);
  return h;
}

// Uniform on the open interval (0, 1); safe to feed into norm_ppf.
inline double u01(std::uint64_t w) { return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53; }

inline double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                          std::uint64_t dim) {
  return norm_ppf(u01(stream_word(seed, path, step, dim)));
}

}  // namespace ifm::num
