// SPDX-License-Identifier: Apache-2.0
#include "thz/singlelink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "thz/special/gamma.hpp"
#include "thz/special/gauss_legendre.hpp"
#include "thz/special/incomplete_gamma.hpp"
#include "thz/special/logsum.hpp"
#include "thz/special/mellin_barnes.hpp"

namespace thz {

namespace {

constexpr double kLn2 = 0.6931471805599453;
const double kNan = std::numeric_limits<double>::quiet_NaN();

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

struct CdfParts {
  double total = 0.0;       // unclamped distribution value
  double tail_bound = 0.0;  // bound on the dropped mixture-tail contribution
};

// F(x) = sum_j [ w_j P(j+1, a) + u_j a^h Gamma(j+1-h, a) ],  a = x / xi.
// The second piece is assembled in log space: Gamma(j+1-h, a) alone reaches
// ~Gamma(j+1) for small a, far beyond double range, while the combined term
// stays below one.
CdfParts cdf_parts(const SingleLinkChannel& ch, double x) {
  CdfParts out;
  if (!(x > 0.0)) return out;
  const double h = ch.h();
  const double alpha = x / ch.xi();
  const auto& lw = ch.weights().logw;
  const int terms = static_cast<int>(lw.size());
  const std::vector<double> lg_upper =
      sf::upper_inc_gamma_log_ladder(h, alpha, terms - 1);
  const double lah = h * std::log(alpha);
  double total = 0.0;
  for (int j = 0; j < terms; ++j) {
    total += std::exp(lw[j]) * sf::lower_reg_gamma(j + 1.0, alpha) +
             std::exp(lw[j] - sf::ln_gamma_real(j + 1.0) + lah + lg_upper[j]);
  }
  out.total = total;
  // First dropped term scales: P(terms+1, a) for the gamma piece, and
  // roughly (a/terms)^h (capped at one) for the incomplete-gamma piece.
  const double scale_p = sf::lower_reg_gamma(terms + 1.0, alpha);
  const double scale_g =
      std::exp(std::min(0.0, lah - h * std::log(static_cast<double>(terms))));
  out.tail_bound = ch.weights().tail_mass * (scale_p + scale_g);
  return out;
}

}  // namespace

SingleLinkChannel::SingleLinkChannel(const FtrParams& fading,
                                     const PointingGeometry& pointing,
                                     double gamma0, const SeriesControl& series)
    : fading_(fading), pointing_(pointing), gamma0_(gamma0) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw std::invalid_argument("SingleLinkChannel: gamma0 must be positive");
  }
  if (!(pointing.s0 > 0.0) || pointing.s0 > 1.0 || !(pointing.h > 0.0)) {
    throw std::invalid_argument(
        "SingleLinkChannel: pointing geometry needs s0 in (0,1] and h > 0");
  }
  xi_ = 2.0 * gamma0 * fading.sigma2() * pointing.s0 * pointing.s0;
  weights_ = ftr_weights(fading, series.weight_tol, series.j_max);
}

SingleLinkChannel SingleLinkChannel::with_gamma0(double gamma0) const {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw std::invalid_argument("SingleLinkChannel: gamma0 must be positive");
  }
  SingleLinkChannel copy(*this);
  copy.gamma0_ = gamma0;
  copy.xi_ = 2.0 * gamma0 * fading_.sigma2() * pointing_.s0 * pointing_.s0;
  return copy;
}

double snr_pdf(const SingleLinkChannel& ch, double x) {
  if (!(x > 0.0)) return 0.0;
  const double h = ch.h();
  const double alpha = x / ch.xi();
  const auto& lw = ch.weights().logw;
  const int terms = static_cast<int>(lw.size());
  const std::vector<double> lg_upper =
      sf::upper_inc_gamma_log_ladder(h, alpha, terms - 1);
  const double la = std::log(alpha);
  sf::LogSum acc;
  for (int j = 0; j < terms; ++j) {
    acc.add(lw[j] - sf::ln_gamma_real(j + 1.0) + (h - 1.0) * la + lg_upper[j]);
  }
  return std::exp(std::log(h) - std::log(ch.xi()) + acc.log_total());
}

double snr_cdf(const SingleLinkChannel& ch, double x) {
  const double f = cdf_parts(ch, x).total;
  return std::min(1.0, std::max(0.0, f));
}

double snr_survival(const SingleLinkChannel& ch, double x) {
  if (!(x > 0.0)) return 1.0;
  const double h = ch.h();
  const double alpha = x / ch.xi();
  const auto& lw = ch.weights().logw;
  const int terms = static_cast<int>(lw.size());
  const std::vector<double> lg_upper =
      sf::upper_inc_gamma_log_ladder(h, alpha, terms - 1);
  const double la = std::log(alpha);
  const double lah = h * la;
  double total = 0.0;
  double logq = -alpha;  // ln Q(1, alpha)
  for (int j = 0; j < terms; ++j) {
    const double lgj1 = sf::ln_gamma_real(j + 1.0);
    if (j > 0) logq = log_add(logq, j * la - alpha - lgj1);
    // w_j Q(j+1, a) - u_j a^h Gamma(j+1-h, a): each difference is >= 0.
    total += std::exp(lw[j] + logq) - std::exp(lw[j] - lgj1 + lah + lg_upper[j]);
  }
  return std::min(1.0, std::max(0.0, total));
}

MetricResult outage_single(const SingleLinkChannel& ch, double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("outage_single: threshold must be positive");
  }
  const CdfParts parts = cdf_parts(ch, threshold);
  MetricResult r = make_metric(parts.total);
  const int terms = static_cast<int>(ch.weights().logw.size());
  r.series_terms = terms;
  r.evaluations = 2LL * terms;
  r.error_abs = parts.tail_bound + 1e-14 * (1.0 + std::fabs(parts.total));
  if (ch.weights().truncated) {
    r.note = "fading series hit j_max before reaching the weight tolerance";
  }
  clamp_unit_interval(r);
  return r;
}

MetricResult ber_single_series(const SingleLinkChannel& ch,
                               const ModulationSpec& mod) {
  if (!(mod.p > 0.0) || !(mod.q > 0.0)) {
    throw std::invalid_argument("ber_single_series: need p > 0 and q > 0");
  }
  const double h = ch.h();
  const double z = 1.0 / (ch.xi() * mod.q);
  const double log_norm = std::log(h) + h * std::log(z) - std::log(2.0) -
                          sf::ln_gamma_real(mod.p);
  const auto& lw = ch.weights().logw;
  const int terms = static_cast<int>(lw.size());

  mb::QuadratureControl ctl;
  ctl.rel_tol = 1e-9;
  ctl.t_max = std::min(200.0, std::max(26.0, 2.0 * h + 30.0));

  MetricResult out = make_metric(0.0);
  double sum = 0.0;
  double err = 0.0;
  double abs_sum = 0.0;
  double kept = 0.0;
  int small_run = 0;
  int used = 0;
  for (int j = 0; j < terms; ++j) {
    const MetricResult g =
        mb::meijer_g(2, 2, {1.0 - h, 1.0 - mod.p - h, 1.0},
                     {j + 1.0 - h, 0.0, -h}, z, ctl, kNan,
                     lw[j] - sf::ln_gamma_real(j + 1.0) + log_norm);
    sum += g.value;
    err += g.error_abs;
    abs_sum += std::fabs(g.value);
    kept += std::exp(lw[j]);
    out.evaluations += g.evaluations;
    out.refinements = std::max(out.refinements, g.refinements);
    out.converged = out.converged && g.converged;
    if (!g.converged && out.note.empty()) out.note = g.note;
    used = j + 1;
    if (j >= 4 && std::fabs(g.value) < 1e-12 * std::fabs(sum)) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }
  // The term decomposition alternates once the argument ratio is large, so
  // the summed value can sit far below the summed magnitudes.  When that
  // amplification (or an unconverged term) would poison the result, fall
  // back to integrating the distribution directly.
  if (!out.converged || abs_sum > 100.0 * std::max(std::fabs(sum), 1e-300)) {
    MetricResult direct = ber_single_quadrature(ch, mod);
    direct.note = "term series lost precision to cancellation; integrated the "
                  "distribution instead";
    return direct;
  }
  // Every remaining mixture component contributes at most half its weight.
  err += 0.5 * std::max(0.0, 1.0 - kept);
  err += 1e-15 * abs_sum;
  out.value = sum;
  out.error_abs = err;
  out.series_terms = used;
  clamp_unit_interval(out);
  return out;
}

MetricResult ber_single_quadrature(const SingleLinkChannel& ch,
                                   const ModulationSpec& mod) {
  if (!(mod.p > 0.0) || !(mod.q > 0.0)) {
    throw std::invalid_argument("ber_single_quadrature: need p > 0 and q > 0");
  }
  // q^p / Gamma(p) * Int_0^V exp(-q v^2) v^{2p-1} F(v^2) dv  (x = v^2), plus
  // the analytic remainder beyond V computed with F ~= 1 there.
  const double vmax = std::sqrt(45.0 / mod.q);
  long long evals = 0;
  const auto f = [&](double v) {
    ++evals;
    const double cdf = snr_cdf(ch, v * v);
    if (cdf <= 0.0) return 0.0;
    return std::exp(-mod.q * v * v + (2.0 * mod.p - 1.0) * std::log(v)) * cdf;
  };

  MetricResult out = make_metric(0.0);
  double integral = 0.0;
  double prev = kNan;
  double step_err = INFINITY;
  for (int panels = 16; panels <= 256; panels *= 2) {
    integral = sf::panel_integrate(f, 0.0, vmax, panels, 20, 0.0);
    if (!std::isnan(prev)) {
      ++out.refinements;
      step_err = std::fabs(integral - prev);
      if (step_err <= 1e-10 * std::max(std::fabs(integral), 1e-300)) break;
    }
    prev = integral;
  }
  const double coeff =
      std::exp(mod.p * std::log(mod.q) - sf::ln_gamma_real(mod.p));
  const double tail =
      0.5 * std::exp(sf::upper_inc_gamma_log(mod.p, mod.q * vmax * vmax) -
                     sf::ln_gamma_real(mod.p));
  out.value = coeff * integral + tail;
  out.error_abs = coeff * (std::isfinite(step_err) ? step_err : 0.0) + tail;
  out.evaluations = evals;
  out.converged = step_err <= 1e-8 * std::max(std::fabs(out.value), 1e-300) ||
                  out.value < 1e-280;
  clamp_unit_interval(out);
  return out;
}

MetricResult capacity_single_exact(const SingleLinkChannel& ch) {
  const double h = ch.h();
  const double z = 1.0 / ch.xi();
  const double base = std::log(ch.xi()) - 1.0 / h;
  const auto& lw = ch.weights().logw;
  const int terms = static_cast<int>(lw.size());

  mb::QuadratureControl ctl;
  ctl.rel_tol = 1e-9;

  MetricResult out = make_metric(0.0);
  double sum = 0.0;
  double err = 0.0;
  double abs_parts = 0.0;
  double max_bracket = 0.0;
  double kept = 0.0;
  int used = 0;
  double rest_bound = 0.0;
  for (int j = 0; j < terms; ++j) {
    const double w = std::exp(lw[j]);
    const MetricResult g =
        mb::meijer_g(3, 2, {1.0, 1.0, 1.0 + h}, {1.0, j + 1.0, h, 0.0}, z, ctl,
                     kNan, -sf::ln_gamma_real(j + 1.0));
    const double psi = sf::digamma(j + 1.0);
    const double bracket = h * g.value + base + psi;
    sum += w * bracket;
    abs_parts += w * (h * std::fabs(g.value) + std::fabs(base) + std::fabs(psi));
    err += w * h * g.error_abs;
    max_bracket = std::max(max_bracket, std::fabs(bracket));
    kept += w;
    out.evaluations += g.evaluations;
    out.refinements = std::max(out.refinements, g.refinements);
    out.converged = out.converged && g.converged;
    if (!g.converged && out.note.empty()) out.note = g.note;
    used = j + 1;
    // All brackets are nonnegative (each is a conditional E[ln(1 + SNR)]),
    // so once the remaining mass cannot move the sum, stop.
    rest_bound = std::max(0.0, 1.0 - kept) *
                 (max_bracket + std::log(2.0 + static_cast<double>(terms)));
    if (j >= 8 && rest_bound < 1e-12 * std::max(std::fabs(sum), 1e-300)) break;
  }
  err += rest_bound + 1e-15 * abs_parts;
  out.value = sum / kLn2;
  out.error_abs = err / kLn2;
  out.series_terms = used;
  if (abs_parts > 50.0 * std::max(std::fabs(sum), 1e-300) && out.note.empty()) {
    out.note = "heavy cancellation between log-moment and correction terms";
  }
  out.raw_value = out.value;
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

MetricResult capacity_single_quadrature(const SingleLinkChannel& ch) {
  // (1/ln 2) Int_0^inf S(x)/(1+x) dx over geometrically growing panels.
  const double xi = ch.xi();
  long long evals = 0;
  const auto f = [&](double x) {
    ++evals;
    return snr_survival(ch, x) / (1.0 + x);
  };

  std::vector<double> edges{0.0};
  double e = xi / 64.0;
  double s_edge = 1.0;
  for (int i = 0; i < 80; ++i) {
    edges.push_back(e);
    s_edge = snr_survival(ch, e);
    ++evals;
    if (e > xi && s_edge < 1e-18) break;
    e *= 2.0;
  }

  double coarse = 0.0;
  double fine = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    coarse += sf::panel_integrate(f, edges[i], edges[i + 1], 1, 16, 0.0);
    fine += sf::panel_integrate(f, edges[i], edges[i + 1], 1, 24, 0.0);
  }

  MetricResult out = make_metric(fine / kLn2);
  const double cutoff_tail = s_edge * edges.back() / (1.0 + edges.back());
  out.error_abs = (std::fabs(fine - coarse) + cutoff_tail) / kLn2;
  out.evaluations = evals;
  out.refinements = 1;
  out.converged =
      out.error_abs <= 1e-6 * std::max(std::fabs(out.value), 1e-300);
  out.raw_value = out.value;
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

MetricResult capacity_single_bound(const SingleLinkChannel& ch) {
  const auto& lw = ch.weights().logw;
  double psi_mix = 0.0;
  for (int j = 0; j < static_cast<int>(lw.size()); ++j) {
    psi_mix += std::exp(lw[j]) * sf::digamma(j + 1.0);
  }
  const double raw =
      (std::log(ch.xi()) - 1.0 / ch.h() + psi_mix) / kLn2;
  MetricResult r = make_metric(raw);
  r.series_terms = static_cast<int>(lw.size());
  r.error_abs = ch.weights().tail_mass *
                (7.0 + std::fabs(std::log(ch.xi())) + 1.0 / ch.h()) / kLn2;
  if (r.value < 0.0) {
    r.value = 0.0;
    r.clamped = true;
  }
  return r;
}

}  // namespace thz
