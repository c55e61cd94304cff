#pragma once

#include <vector>

#include "ifm/factors.hpp"
#include "ifm/market_data.hpp"

namespace ifm {

// Pairwise bucket correlations, tagged with the bucket tenors.
struct CorrelationMatrix {
  std::vector<double> tenors;
  std::vector<double> a;  // row-major size() x size()

  int size() const { return static_cast<int>(tenors.size()); }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * tenors.size() + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * tenors.size() + j]; }

  // Symmetry, unit diagonal, entries in [-1,1], min eigenvalue >= -1e-8.
  void validate() const;
};

// Pearson correlations of daily differences of the log-forward columns.
CorrelationMatrix market_correlations(const HistoricalSeries& h);

struct PcaResult {
  std::vector<double> eigenvalues;                // descending, >= 0
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k][bucket]
  std::vector<double> cumulative;                 // explained-variance fractions
};

// Eigendecomposition of the covariance of daily differences. Each
// eigenvector's largest-magnitude entry is flipped positive so the output is
// reproducible.
PcaResult pca(const HistoricalSeries& h);

// J(P) = sum_{j<k} [rho_model(0, T_j, T_k) - target(j,k)]^2.
double correlation_objective(const FactorParams& p, const CorrelationMatrix& target);

struct FactorFit {
  FactorParams params;
  double objective = 0.0;
  bool converged = true;  // false when every start hit the iteration cap
};

// Best of `starts` bound-constrained quasi-Newton runs from random points
// (h in [-5,5], kappa in [0.01,0.5]); deterministic given the seed.
FactorFit fit_factor_params(const CorrelationMatrix& target, int factor_count,
                            std::uint64_t seed = 20240901ull, int starts = 8);

}  // namespace ifm
