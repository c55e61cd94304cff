#include "ifm/num.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "ifm/errors.hpp"

namespace ifm::num {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// AS241 rational approximations, accurate to full double precision.
double norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("norm_ppf: p must be in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
             3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
           5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
         4.2313330701600911252e1) * r + 1.0;
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

namespace {

GlRule compute_gl_rule(int n) {
  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }
  return rule;
}

}  // namespace

const GlRule& gl_rule(int n) {
  if (n < 1) throw ValidationError("gl_rule: order must be positive");
  static std::map<int, GlRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl_rule(n)).first;
  return it->second;
}

std::vector<double> merged_breakpoints(double a, double b,
                                       const std::vector<const std::vector<double>*>& lists) {
  std::vector<double> pts{a, b};
  for (const auto* lst : lists)
    for (double t : *lst)
      if (t > a + 1e-14 && t < b - 1e-14) pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-12; }),
            pts.end());
  return pts;
}

Pchip Pchip::build(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.empty()) throw ValidationError("pchip: bad knot arrays");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw ValidationError("pchip: knots must increase strictly");

  Pchip p;
  p.x_ = std::move(x);
  p.y_ = std::move(y);
  const std::size_t n = p.x_.size();
  p.m_.assign(n, 0.0);
  if (n == 1) return p;
  if (n == 2) {
    const double d = (p.y_[1] - p.y_[0]) / (p.x_[1] - p.x_[0]);
    p.m_[0] = p.m_[1] = d;
    return p;
  }

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = p.x_[k + 1] - p.x_[k];
    d[k] = (p.y_[k + 1] - p.y_[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] == 0.0 || d[k] == 0.0 || (d[k - 1] > 0) != (d[k] > 0)) {
      p.m_[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      p.m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0)
      m = 0.0;
    else if ((d0 > 0) != (d1 > 0) && std::abs(m) > 3.0 * std::abs(d0))
      m = 3.0 * d0;
    return m;
  };
  p.m_[0] = edge(h[0], h[1], d[0], d[1]);
  p.m_[n - 1] = edge(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return p;
}

std::size_t Pchip::interval(double x) const {
  // Last knot <= x, clamped so interior knots evaluate on their right piece.
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (k + 1 >= x_.size()) k = x_.size() - 2;
  return k;
}

double Pchip::value(double x) const {
  if (x_.size() == 1 || x <= x_.front()) return x <= x_.front() ? y_.front() : y_.back();
  if (x >= x_.back()) return y_.back();
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = x - x_[k];
  const double dk = (y_[k + 1] - y_[k]) / h;
  const double c2 = (3.0 * dk - 2.0 * m_[k] - m_[k + 1]) / h;
  const double c3 = (m_[k] + m_[k + 1] - 2.0 * dk) / (h * h);
  return y_[k] + t * (m_[k] + t * (c2 + t * c3));
}

double Pchip::deriv(double x) const {
  if (x_.size() == 1 || x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = x - x_[k];
  const double dk = (y_[k + 1] - y_[k]) / h;
  const double c2 = (3.0 * dk - 2.0 * m_[k] - m_[k + 1]) / h;
  const double c3 = (m_[k] + m_[k + 1] - 2.0 * dk) / (h * h);
  return m_[k] + t * (2.0 * c2 + 3.0 * t * c3);
}

double Pchip::deriv2(double x) const {
  if (x_.size() == 1 || x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = x - x_[k];
  const double dk = (y_[k + 1] - y_[k]) / h;
  const double c2 = (3.0 * dk - 2.0 * m_[k] - m_[k + 1]) / h;
  const double c3 = (m_[k] + m_[k + 1] - 2.0 * dk) / (h * h);
  return 2.0 * c2 + 6.0 * t * c3;
}

std::vector<double> cholesky_lower_psd(const std::vector<double>& a, int n, double tol) {
  if (static_cast<int>(a.size()) != n * n) throw ValidationError("cholesky: size mismatch");
  std::vector<double> l(a.size(), 0.0);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i * n + i]));
  if (scale == 0.0) scale = 1.0;
  for (int j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (int k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
    if (diag < -tol * scale) throw NumericalError("cholesky: matrix is not positive semidefinite");
    diag = std::max(diag, 0.0);
    l[j * n + j] = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (int k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = (l[j * n + j] > 0.0) ? v / l[j * n + j] : 0.0;
    }
  }
  return l;
}

}  // namespace ifm::num
