#include "ifm/factors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ifm/errors.hpp"
#include "ifm/num.hpp"
#include "io_util.hpp"

namespace ifm {

FactorParams FactorParams::one() { return FactorParams{}; }

FactorParams FactorParams::two(double h1, double h2, double kappa1) {
  if (!(kappa1 > 0.0)) throw ValidationError("factors: kappa1 must be positive");
  FactorParams p;
  p.factor_count = 2;
  p.h = {h1, h2, 0.0, 0.0};
  p.kappa = {kappa1, 0.0};
  return p;
}

FactorParams FactorParams::three(double h1, double h2, double h3, double h4, double kappa1,
                                 double kappa2) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0))
    throw ValidationError("factors: kappas must be positive");
  FactorParams p;
  p.factor_count = 3;
  p.h = {h1, h2, h3, h4};
  p.kappa = {kappa1, kappa2};
  return p;
}

double loading(const FactorParams& p, int alpha, double reset, double t) {
  if (alpha < 1 || alpha > p.factor_count)
    throw ValidationError("loading: factor index out of range");
  const double tau = std::max(reset - t, 0.0);
  switch (alpha) {
    case 1:
      return 1.0;
    case 2:
      return p.h[0] * std::exp(-p.kappa[0] * tau) + p.h[1];
    default:
      return p.h[2] * tau * std::exp(-p.kappa[1] * tau) + p.h[3];
  }
}

double zeta(const FactorParams& p, double t_i, double t_j, double t) {
  double acc = 0.0;
  for (int a = 1; a <= p.factor_count; ++a)
    acc += loading(p, a, t_i, t) * loading(p, a, t_j, t);
  return acc;
}

double inst_correlation(const FactorParams& p, double t_i, double t_j, double t) {
  return zeta(p, t_i, t_j, t) / std::sqrt(zeta(p, t_i, t_i, t) * zeta(p, t_j, t_j, t));
}

namespace {

// int_t^{T} zeta_ii(s) ds in closed form (tau = T - t).
double integrated_zeta_diag_tail(const FactorParams& p, double reset, double t) {
  const double tau = reset - t;
  double acc = tau;  // factor 1
  if (p.factor_count >= 2) {
    const double h1 = p.h[0], h2 = p.h[1], k1 = p.kappa[0];
    acc += h2 * h2 * tau;
    acc += h1 * h1 / (2.0 * k1) * (1.0 - std::exp(-2.0 * k1 * tau));
    acc += 2.0 * h1 * h2 / k1 * (1.0 - std::exp(-k1 * tau));
  }
  if (p.factor_count >= 3) {
    const double h3 = p.h[2], h4 = p.h[3], k2 = p.kappa[1];
    const double e1 = std::exp(-k2 * tau);
    const double e2 = std::exp(-2.0 * k2 * tau);
    acc += h4 * h4 * tau;
    acc += -h3 * h3 * tau / (2.0 * k2 * k2) * (k2 * tau + 1.0) * e2;
    acc += -2.0 * h3 * h4 * tau / k2 * e1;
    acc += h3 * h3 / (4.0 * k2 * k2 * k2) * (1.0 - e2);
    acc += 2.0 * h3 * h4 / (k2 * k2) * (1.0 - e1);
  }
  return acc;
}

}  // namespace

double integrated_zeta(const FactorParams& p, double t_i, double t_j, double t0, double t1) {
  if (t0 > t1) throw ValidationError("integrated_zeta: reversed range");
  if (t1 > std::min(t_i, t_j) + 1e-9)
    throw ValidationError("integrated_zeta: range extends past a reset");
  if (p.factor_count == 1) return t1 - t0;
  if (std::abs(t_i - t_j) < 1e-14)
    return integrated_zeta_diag_tail(p, t_i, t0) - integrated_zeta_diag_tail(p, t_i, t1);
  // Smooth integrand; panels capped at five years keep the quadrature exact to
  // machine precision for the kappa ranges the calibration explores.
  const int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 5.0)));
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = t0 + (t1 - t0) * k / panels;
    const double b = t0 + (t1 - t0) * (k + 1) / panels;
    acc += num::gl_integrate([&](double s) { return zeta(p, t_i, t_j, s); }, a, b, 32);
  }
  return acc;
}

std::vector<double> calibrate_sigmas(const FactorParams& p, const CpiVolSurface& surface,
                                     double kbar) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(surface.size()));
  for (int i = 0; i < surface.size(); ++i) {
    const VolTenor& t = surface.tenor(i);
    const double vol = t.vol_at(t.strike_for(kbar));
    const double izeta = integrated_zeta(p, t.reset, t.reset, 0.0, t.reset);
    out.push_back(vol * std::sqrt(t.reset / izeta));
  }
  return out;
}

RateCorrelations RateCorrelations::flat(int m, double rho) {
  return RateCorrelations{std::vector<double>(static_cast<std::size_t>(m), rho)};
}

double RateCorrelations::sum_sq() const {
  double acc = 0.0;
  for (double r : rho) acc += r * r;
  return acc;
}

namespace {

double rho_lambda_sum(const FactorParams& p, const RateCorrelations& rc, double reset, double t) {
  if (static_cast<int>(rc.rho.size()) != p.factor_count)
    throw ValidationError("rate correlations: size must equal the factor count");
  double acc = 0.0;
  for (int a = 1; a <= p.factor_count; ++a)
    acc += rc.rho[static_cast<std::size_t>(a - 1)] * loading(p, a, reset, t);
  return acc;
}

}  // namespace

double nu(const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g, double pay,
          double reset, double t) {
  return g.vol.at(t) * b_factor(g, t, pay) * rho_lambda_sum(p, rc, reset, t);
}

double nu_bar(const FactorParams& p, const RateCorrelations& rc, const G1ppParams& g, double pay,
              double reset, double t_p, double t) {
  const double db = b_factor(g, t, pay) - b_factor(g, t, t_p);
  return g.vol.at(t) * db * rho_lambda_sum(p, rc, reset, t);
}

FactorConfig load_factor_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  try {
    const int m = j.at("M").get<int>();
    const auto h = j.at("h").get<std::vector<double>>();
    const auto kappa = j.at("kappa").get<std::vector<double>>();
    const auto rho = j.at("rho_rF").get<std::vector<double>>();
    FactorConfig cfg;
    if (m == 1 && h.empty() && kappa.empty()) {
      cfg.params = FactorParams::one();
    } else if (m == 2 && h.size() == 2 && kappa.size() == 1) {
      cfg.params = FactorParams::two(h[0], h[1], kappa[0]);
    } else if (m == 3 && h.size() == 4 && kappa.size() == 2) {
      cfg.params = FactorParams::three(h[0], h[1], h[2], h[3], kappa[0], kappa[1]);
    } else {
      throw ValidationError("M must be 1, 2 or 3 with matching h/kappa lengths");
    }
    if (static_cast<int>(rho.size()) != m)
      throw ValidationError("rho_rF length must equal M");
    for (double r : rho)
      if (r < -1.0 || r > 1.0) throw ValidationError("rho_rF entries must be in [-1, 1]");
    cfg.rho = RateCorrelations{rho};
    if (cfg.rho.sum_sq() > 1.0 + 1e-12)
      throw ValidationError("sum of squared rho_rF must not exceed 1");
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_factor_config(const std::string& path, const FactorConfig& cfg) {
  nlohmann::json j;
  j["M"] = cfg.params.factor_count;
  std::vector<double> h, kappa;
  if (cfg.params.factor_count >= 2) {
    h = {cfg.params.h[0], cfg.params.h[1]};
    kappa = {cfg.params.kappa[0]};
  }
  if (cfg.params.factor_count >= 3) {
    h.push_back(cfg.params.h[2]);
    h.push_back(cfg.params.h[3]);
    kappa.push_back(cfg.params.kappa[1]);
  }
  j["h"] = h;
  j["kappa"] = kappa;
  j["rho_rF"] = cfg.rho.rho;
  auto out = io::open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace ifm
