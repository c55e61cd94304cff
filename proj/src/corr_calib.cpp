#include "ifm/corr_calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ifm/errors.hpp"
#include "ifm/num.hpp"

namespace ifm {

namespace {

Eigen::MatrixXd daily_diffs(const HistoricalSeries& h) {
  if (h.rows() < 60) throw ValidationError("history: need at least 60 daily rows");
  const auto n = static_cast<Eigen::Index>(h.rows()) - 1;
  const auto m = static_cast<Eigen::Index>(h.cols());
  Eigen::MatrixXd d(n, m);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < m; ++c) d(r, c) = h.at(r + 1, c) - h.at(r, c);
  return d;
}

Eigen::MatrixXd diff_covariance(const HistoricalSeries& h) {
  Eigen::MatrixXd d = daily_diffs(h);
  const Eigen::RowVectorXd mean = d.colwise().mean();
  d.rowwise() -= mean;
  return d.transpose() * d / static_cast<double>(d.rows() - 1);
}

}  // namespace

void CorrelationMatrix::validate() const {
  const int n = size();
  if (n == 0 || a.size() != static_cast<std::size_t>(n) * n)
    throw ValidationError("correlation matrix: shape mismatch");
  for (int i = 0; i < n; ++i) {
    if (std::abs(at(i, i) - 1.0) > 1e-12)
      throw ValidationError("correlation matrix: diagonal entry differs from 1");
    for (int j = 0; j < n; ++j) {
      if (std::abs(at(i, j) - at(j, i)) > 1e-12)
        throw ValidationError("correlation matrix: not symmetric");
      if (std::abs(at(i, j)) > 1.0 + 1e-12)
        throw ValidationError("correlation matrix: entry outside [-1, 1]");
    }
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw ValidationError("correlation matrix: not positive semidefinite");
}

CorrelationMatrix market_correlations(const HistoricalSeries& h) {
  const Eigen::MatrixXd cov = diff_covariance(h);
  const auto m = cov.rows();
  for (Eigen::Index c = 0; c < m; ++c)
    if (!(cov(c, c) > 0.0)) throw ValidationError("history: constant bucket column");
  CorrelationMatrix out;
  out.tenors = h.buckets();
  out.a.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.at(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double r = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
      out.at(i, j) = out.at(j, i) = std::clamp(r, -1.0, 1.0);
    }
  }
  return out;
}

PcaResult pca(const HistoricalSeries& h) {
  const Eigen::MatrixXd cov = diff_covariance(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");
  const auto m = cov.rows();
  PcaResult out;
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m);
  out.cumulative.resize(m);
  double total = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = m - 1 - k;  // Eigen sorts ascending
    out.eigenvalues[k] = std::max(es.eigenvalues()(src), 0.0);
    total += out.eigenvalues[k];
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    out.eigenvectors[k].assign(v.data(), v.data() + m);
  }
  if (!(total > 0.0)) throw ValidationError("pca: zero total variance");
  double run = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    run += out.eigenvalues[k];
    out.cumulative[k] = run / total;
  }
  out.cumulative.back() = 1.0;
  return out;
}

double correlation_objective(const FactorParams& p, const CorrelationMatrix& target) {
  const int n = target.size();
  double j = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double d = inst_correlation(p, target.tenors[a], target.tenors[b], 0.0) -
                       target.at(a, b);
      j += d * d;
    }
  return j;
}

namespace {

// Parameter packing: M=2 -> {h1,h2,k1}; M=3 -> {h1,h2,k1,h3,h4,k2}.
FactorParams unpack(int m, const Eigen::VectorXd& x) {
  if (m == 2) return FactorParams::two(x(0), x(1), x(2));
  return FactorParams::three(x(0), x(1), x(3), x(4), x(2), x(5));
}

struct Box {
  Eigen::VectorXd lo, hi;

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
  }
};

Box param_box(int dim) {
  Box b;
  b.lo.resize(dim);
  b.hi.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const bool is_kappa = (i == 2 || i == 5);
    b.lo(i) = is_kappa ? 1e-3 : -10.0;
    b.hi(i) = is_kappa ? 2.0 : 10.0;
  }
  return b;
}

struct RunResult {
  Eigen::VectorXd x;
  double j = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Projected BFGS with Armijo backtracking and central-difference gradients.
RunResult minimize(int m, const CorrelationMatrix& target, const Box& box, Eigen::VectorXd x) {
  const int dim = static_cast<int>(x.size());
  auto f = [&](const Eigen::VectorXd& p) { return correlation_objective(unpack(m, p), target); };
  auto grad = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd g(dim);
    const double step = 1e-6;
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd up = p, dn = p;
      up(i) += step;
      dn(i) -= step;
      g(i) = (f(up) - f(dn)) / (2.0 * step);
    }
    return g;
  };

  x = box.clamp(x);
  double fx = f(x);
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  RunResult out{x, fx, false};

  for (int it = 0; it < 500; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-8) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -(hinv * g);
    if (dir.dot(g) >= 0.0) dir = -g;  // reset on a non-descent direction

    double alpha = 1.0;
    Eigen::VectorXd xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = box.clamp(x + alpha * dir);
      fn = f(xn);
      if (fn <= fx + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted || !(fn < fx)) {
      out.converged = true;  // line search exhausted: locally stationary
      break;
    }

    const Eigen::VectorXd gn = grad(xn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      const Eigen::MatrixXd v = eye - (s * y.transpose()) / sy;
      hinv = v * hinv * v.transpose() + (s * s.transpose()) / sy;
    } else {
      hinv = Eigen::MatrixXd::Identity(dim, dim);
    }

    const double drop = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (drop < 1e-12) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.j = fx;
  return out;
}

}  // namespace

FactorFit fit_factor_params(const CorrelationMatrix& target, int factor_count, std::uint64_t seed,
                            int starts) {
  if (factor_count != 2 && factor_count != 3)
    throw ValidationError("fit_factor_params: factor count must be 2 or 3");
  target.validate();
  if (starts < 1) throw ValidationError("fit_factor_params: need at least one start");

  const int dim = factor_count == 2 ? 3 : 6;
  const Box box = param_box(dim);
  RunResult best;
  bool any_converged = false;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < dim; ++i) {
      const double u = num::u01(num::stream_word(seed, static_cast<std::uint64_t>(s), 0,
                                                 static_cast<std::uint64_t>(i)));
      const bool is_kappa = (i == 2 || i == 5);
      x0(i) = is_kappa ? 0.01 + u * 0.49 : -5.0 + u * 10.0;
    }
    RunResult r = minimize(factor_count, target, box, x0);
    any_converged = any_converged || r.converged;
    const bool better =
        r.j < best.j ||
        (r.j == best.j && std::lexicographical_compare(r.x.data(), r.x.data() + dim,
                                                       best.x.data(), best.x.data() + dim));
    if (best.x.size() == 0 || better) {
      best.x = r.x;
      best.j = r.j;
    }
  }

  FactorFit fit;
  fit.params = unpack(factor_count, best.x);
  fit.objective = best.j;
  fit.converged = any_converged;
  return fit;
}

}  // namespace ifm
