// SPDX-License-Identifier: Apache-2.0
#include "thz/special/incomplete_gamma.hpp"

#include <cmath>
#include <stdexcept>

#include "thz/special/gamma.hpp"

namespace thz::sf {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// log(exp(a) + exp(b)) without overflow
double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Legendre continued fraction for Gamma(s,x) * x^{-s} e^{x}, modified Lentz.
// Converges for x > 0; iteration count grows roughly like |s|/x when x < |s|.
double upper_cf_scaled(double s, double x, int* iters) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = (b != 0.0) ? 1.0 / b : 1.0 / tiny;
  double h = d;
  int i = 1;
  for (; i < 5000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  if (iters) *iters = i;
  return h;
}

// Power-series machinery for s <= 1, x < 0.5:
//   Gamma(s,x) = x^s * (pair_scaled - rest),
//   rest = sum_{n != n0} (-x)^n / (n! (s+n)),
//   pair_scaled = x^{-s} * [Gamma(s) - series term n0], fused so the two
//   poles at integer s cancel analytically (finite even at exact integers).
struct NegSeriesParts {
  double inner;  // pair_scaled - rest;  Gamma(s,x) = x^s * inner
};

NegSeriesParts upper_series_neg_parts(double s, double x) {
  int n0 = static_cast<int>(std::lround(-s));
  if (n0 < 0) n0 = 0;
  const double delta = s + static_cast<double>(n0);
  double rest = 0.0;
  double term = 1.0;  // (-x)^n / n!
  int n = 0;
  while (true) {
    if (n != n0) rest += term / (s + static_cast<double>(n));
    term *= -x / static_cast<double>(n + 1);
    ++n;
    if (n > n0 &&
        std::fabs(term) < 1e-18 * (1.0 + std::fabs(rest) * std::fabs(s + n))) {
      break;
    }
    if (n > 500) break;
  }
  const double lnx = std::log(x);
  double pair_scaled;
  const double sign_n0 = (n0 % 2 == 0) ? 1.0 : -1.0;
  double xn0_over_fact = 1.0;  // x^{n0}/n0!
  for (int k = 1; k <= n0; ++k) {
    xn0_over_fact *= x / static_cast<double>(k);
  }
  if (std::fabs(delta) <= 0.5) {
    // u = ln[Gamma(1+delta) / prod_k (1-delta/k)] - delta ln x,  all O(delta)
    double u = ln_gamma1p(delta);
    for (int k = 1; k <= n0; ++k) {
      u -= std::log1p(-delta / static_cast<double>(k));
    }
    u -= delta * lnx;
    double core;
    if (delta != 0.0) {
      core = std::expm1(u) / delta;
    } else {
      // limit: psi(n0+1) - ln x
      double harmonic = 0.0;
      for (int k = 1; k <= n0; ++k) harmonic += 1.0 / static_cast<double>(k);
      core = -kEulerGamma + harmonic - lnx;
    }
    pair_scaled = sign_n0 * xn0_over_fact * core;
  } else {
    // |delta| in (0.5, 1]: only reachable for s in (0.5, 1] where n0 = 0
    const double gam_s = std::tgamma(s);
    pair_scaled = gam_s * std::exp(-s * lnx) - sign_n0 * xn0_over_fact / delta;
  }
  return {pair_scaled - rest};
}

// lower regularized series, valid for a > 0, x < a + 1
double lower_reg_series(double a, double x) {
  double term = 1.0 / a;
  double total = term;
  double ap = a;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    total += term;
    if (std::fabs(term) < 1e-17 * std::fabs(total)) break;
  }
  return total * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double upper_inc_gamma(double s, double x) {
  if (x < 0.0) throw std::domain_error("upper_inc_gamma: x must be >= 0");
  if (x == 0.0) {
    if (s <= 0.0) {
      throw std::domain_error("upper_inc_gamma: diverges at x=0 for s<=0");
    }
    return std::tgamma(s);
  }
  if (s <= 1.0) {
    if (x < 0.5) {
      const auto parts = upper_series_neg_parts(s, x);
      return std::exp(s * std::log(x)) * parts.inner;
    }
    return upper_cf_scaled(s, x, nullptr) * std::exp(-x + s * std::log(x));
  }
  if (x < s + 1.0) {
    return (1.0 - lower_reg_series(s, x)) * std::exp(std::lgamma(s));
  }
  return upper_cf_scaled(s, x, nullptr) * std::exp(-x + s * std::log(x));
}

double upper_inc_gamma_log(double s, double x) {
  if (!(x > 0.0)) throw std::domain_error("upper_inc_gamma_log: x must be > 0");
  if (s <= 1.0) {
    if (x < 0.5) {
      const auto parts = upper_series_neg_parts(s, x);
      // inner > 0 always (the function itself is positive)
      return s * std::log(x) + std::log(parts.inner);
    }
    return -x + s * std::log(x) + std::log(upper_cf_scaled(s, x, nullptr));
  }
  if (x < s + 1.0) {
    return std::log1p(-lower_reg_series(s, x)) + std::lgamma(s);
  }
  return -x + s * std::log(x) + std::log(upper_cf_scaled(s, x, nullptr));
}

double lower_reg_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("lower_reg_gamma: a must be > 0");
  if (x < 0.0) throw std::domain_error("lower_reg_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return lower_reg_series(a, x);
  const double q =
      upper_cf_scaled(a, x, nullptr) * std::exp(-x + a * std::log(x) - std::lgamma(a));
  return 1.0 - q;
}

std::vector<double> upper_inc_gamma_log_ladder(double h, double x, int jmax) {
  std::vector<double> out(static_cast<size_t>(jmax) + 1);
  const double lnx = std::log(x);
  int j = 0;
  // direct evaluations while s_j = j+1-h <= 1 (j = 0 always qualifies)
  for (; j <= jmax && static_cast<double>(j) + 1.0 - h <= 1.0; ++j) {
    out[static_cast<size_t>(j)] = upper_inc_gamma_log(j + 1.0 - h, x);
  }
  for (; j <= jmax; ++j) {
    const double s_prev = static_cast<double>(j) - h;  // ladder from Gamma(s_prev,x)
    out[static_cast<size_t>(j)] =
        log_add_exp(std::log(s_prev) + out[static_cast<size_t>(j - 1)],
                    s_prev * lnx - x);
  }
  return out;
}

}  // namespace thz::sf
