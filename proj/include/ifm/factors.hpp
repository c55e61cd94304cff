#pragma once

#include <array>
#include <vector>

#include "ifm/g1pp.hpp"
#include "ifm/market_data.hpp"

namespace ifm {

// Deterministic loadings of the forward-CPI factors. Factor 1 is flat; factors
// 2 and 3 decay in time-to-reset tau = T_i - t:
//   lambda_2 = h1 exp(-kappa1 tau) + h2
//   lambda_3 = h3 tau exp(-kappa2 tau) + h4
struct FactorParams {
  int factor_count = 1;  // M in {1, 2, 3}
  std::array<double, 4> h{};
  std::array<double, 2> kappa{};

  static FactorParams one();
  static FactorParams two(double h1, double h2, double kappa1);
  static FactorParams three(double h1, double h2, double h3, double h4, double kappa1,
                            double kappa2);
};

// lambda^alpha(T_i, t), alpha in 1..M. Loadings freeze at the reset: tau is
// floored at zero for t > T_i.
double loading(const FactorParams& p, int alpha, double reset, double t);

// zeta_ij(t) = sum_alpha lambda^alpha(T_i, t) lambda^alpha(T_j, t).
double zeta(const FactorParams& p, double t_i, double t_j, double t);

double inst_correlation(const FactorParams& p, double t_i, double t_j, double t);

// int_{t0}^{t1} zeta_ij(s) ds. Same-tenor integrals use the closed form;
// cross-tenor integrals use Gauss-Legendre quadrature.
double integrated_zeta(const FactorParams& p, double t_i, double t_j, double t0, double t1);

// Scale parameters sigma_i matching each quoted smile at the given contract
// moneyness: sigma_i = vol(K) * sqrt(T_i / int_0^{T_i} zeta_ii).
std::vector<double> calibrate_sigmas(const FactorParams& p, const CpiVolSurface& surface,
                                     double kbar);

// Correlations of the short-rate factor with each inflation factor.
struct RateCorrelations {
  std::vector<double> rho;  // size M, each in [-1, 1], sum of squares <= 1

  static RateCorrelations flat(int m, double rho);
  double sum_sq() const;
};

// Risk-neutral drift coefficient nu_i(t) = sigma^r_t b(t, T_i~) sum rho_a lambda_a.
double nu(const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g, double pay,
          double reset, double t);

// Pay-measure drift coefficient: b(t, T_i~) replaced by b(t, T_i~) - b(t, T_p).
double nu_bar(const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g, double pay,
              double reset, double t_p, double t);

// factors.json round trip: {"M": int, "h": [...], "kappa": [...], "rho_rF": [...]}.
struct FactorConfig {
  FactorParams params;
  RateCorrelations rho;
};
FactorConfig load_factor_config(const std::string& path);
void save_factor_config(const std::string& path, const FactorConfig& cfg);

}  // namespace ifm
