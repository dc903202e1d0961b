// SPDX-License-Identifier: Apache-2.0
#include "thz/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "thz/special/gamma.hpp"
#include "thz/special/incomplete_gamma.hpp"
#include "thz/special/logsum.hpp"

namespace thz {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double path_gain(const LinkBudget& link) {
  if (!(link.frequency_hz > 0.0) || !(link.distance_m > 0.0)) {
    throw std::invalid_argument("path_gain: frequency and distance must be positive");
  }
  const double spreading =
      kSpeedOfLight / (4.0 * M_PI * link.frequency_hz * link.distance_m);
  const double antenna =
      std::sqrt(db_to_linear(link.tx_gain_dbi) * db_to_linear(link.rx_gain_dbi));
  const double absorption = std::exp(-0.5 * link.absorption_per_m * link.distance_m);
  return spreading * antenna * absorption;
}

PointingGeometry derive_pointing(const PointingParams& p) {
  if (!(p.r1_m > 0.0) || !(p.wz_m > 0.0) || !(p.sigma_s_m > 0.0)) {
    throw std::invalid_argument("derive_pointing: all lengths must be positive");
  }
  const double upsilon = std::sqrt(M_PI / 2.0) * p.r1_m / p.wz_m;
  const double erf_u = std::erf(upsilon);
  PointingGeometry g;
  g.s0 = erf_u * erf_u;
  const double wzeq2 = p.wz_m * p.wz_m * std::sqrt(M_PI) * erf_u /
                       (2.0 * upsilon * std::exp(-upsilon * upsilon));
  g.wzeq_m = std::sqrt(wzeq2);
  g.phi = g.wzeq_m / (2.0 * p.sigma_s_m);
  g.h = 0.5 * g.phi * g.phi;
  return g;
}

PointingParams pointing_for_targets(double r1_m, double s0, double phi) {
  if (!(r1_m > 0.0) || !(s0 > 0.0) || !(s0 < 1.0) || !(phi > 0.0)) {
    throw std::invalid_argument("pointing_for_targets: need r1 > 0, s0 in (0,1), phi > 0");
  }
  // invert erf(upsilon) = sqrt(s0) by Newton iteration
  const double target = std::sqrt(s0);
  double u = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double f = std::erf(u) - target;
    const double df = 2.0 / std::sqrt(M_PI) * std::exp(-u * u);
    const double step = f / df;
    u -= step;
    if (u <= 0.0) u = 1e-8;
    if (std::fabs(step) < 1e-15 * (1.0 + u)) break;
  }
  PointingParams p;
  p.r1_m = r1_m;
  p.wz_m = std::sqrt(M_PI / 2.0) * r1_m / u;
  // geometry with a placeholder jitter fixes wzeq, then jitter realizes phi
  p.sigma_s_m = 1.0;
  const PointingGeometry g = derive_pointing(p);
  p.sigma_s_m = g.wzeq_m / (2.0 * phi);
  return p;
}

double pointing_pdf(const PointingGeometry& g, double hp) {
  if (!(hp > 0.0) || hp > g.s0) return 0.0;
  const double p2 = g.phi * g.phi;
  return p2 / std::pow(g.s0, p2) * std::pow(hp, p2 - 1.0);
}

double ftr_log_coefficient(const FtrParams& p, int j) {
  if (j < 0) throw std::invalid_argument("ftr_log_coefficient: j must be >= 0");
  if (!(p.m > 0.0) || p.k < 0.0 || p.delta < 0.0 || p.delta > 1.0) {
    throw std::invalid_argument("ftr_log_coefficient: invalid fading parameters");
  }
  const double mj = p.m + static_cast<double>(j);
  // periodic trapezoid over theta in [0, 2pi), doubled until stable
  double prev = NAN;
  double result = 0.0;
  for (int n = 256; n <= 8192; n *= 2) {
    sf::LogSum acc;
    const double step = 2.0 * M_PI / n;
    for (int i = 0; i < n; ++i) {
      const double ct = std::cos(step * i);
      const double a = static_cast<double>(j) * std::log1p(p.delta * ct);
      const double b = -mj * std::log(p.m + p.k + p.k * p.delta * ct);
      acc.add(a + b);
    }
    result = acc.log_total() - std::log(static_cast<double>(n));
    if (!std::isnan(prev) && std::fabs(result - prev) < 1e-13 * (1.0 + std::fabs(result))) {
      break;
    }
    prev = result;
  }
  return std::lgamma(mj) + result;
}

double ftr_coefficient(const FtrParams& p, int j) {
  return std::exp(ftr_log_coefficient(p, j));
}

FtrWeights ftr_weights(const FtrParams& p, double tol, int j_max) {
  if (!(tol > 0.0) || j_max < 0) {
    throw std::invalid_argument("ftr_weights: need tol > 0 and j_max >= 0");
  }
  FtrWeights w;
  if (p.k == 0.0) {
    // single-term mixture: the specular components vanish
    w.logw.push_back(0.0);
    return w;
  }
  const double base = p.m * std::log(p.m) - std::lgamma(p.m);
  const double lnk = std::log(p.k);
  double captured = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    const double lw = base + j * lnk + ftr_log_coefficient(p, j) -
                      std::lgamma(static_cast<double>(j) + 1.0);
    w.logw.push_back(lw);
    captured += std::exp(lw);
    if (1.0 - captured <= tol) {
      w.tail_mass = std::max(0.0, 1.0 - captured);
      return w;
    }
  }
  w.tail_mass = std::max(0.0, 1.0 - captured);
  w.truncated = true;
  return w;
}

double ftr_power_pdf(const FtrParams& p, const FtrWeights& w, double x) {
  if (!(x > 0.0)) return 0.0;
  const double two_sigma2 = 2.0 * p.sigma2();
  const double lx = std::log(x / two_sigma2);
  double total = 0.0;
  for (size_t j = 0; j < w.logw.size(); ++j) {
    // Erlang(j+1, 2 sigma^2) component
    const double lt = w.logw[j] - sf::ln_gamma_real(static_cast<double>(j) + 1.0) +
                      static_cast<double>(j) * lx - x / two_sigma2 -
                      std::log(two_sigma2);
    total += std::exp(lt);
  }
  return total;
}

double ftr_power_cdf(const FtrParams& p, const FtrWeights& w, double x) {
  if (!(x > 0.0)) return 0.0;
  const double alpha = x / (2.0 * p.sigma2());
  double total = 0.0;
  for (size_t j = 0; j < w.logw.size(); ++j) {
    total += std::exp(w.logw[j]) *
             sf::lower_reg_gamma(static_cast<double>(j) + 1.0, alpha);
  }
  return total;
}

}  // namespace thz
