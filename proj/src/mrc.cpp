// SPDX-License-Identifier: Apache-2.0
#include "thz/mrc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thz/special/gamma.hpp"
#include "thz/special/gauss_legendre.hpp"
#include "thz/special/incomplete_gamma.hpp"
#include "thz/special/logsum.hpp"

namespace thz {
namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.6931471805599453;
const double kNan = std::numeric_limits<double>::quiet_NaN();

// All branch contours share one abscissa: the midpoint of the common strip
// (-h, min(0, 1-h)) where every branch kernel is analytic.
double branch_abscissa(double h) {
  return 0.5 * (-h + std::min(0.0, 1.0 - h));
}

// Distance from that abscissa to the nearest kernel pole; the trapezoid
// discretization error decays like exp(-2 pi margin / step).
double strip_margin(double h) { return 0.5 * std::min(1.0, h); }

// Contour half-length for an integrand decaying like exp(-decay |t|), with
// ten nats of headroom for polynomial prefactors.
double tail_length(double tol, double decay) {
  return (-std::log(std::clamp(tol, 1e-14, 1e-2)) + 10.0) / decay;
}

double tail_mass_sum(const MrcChannel& ch) {
  double s = 0.0;
  for (int i = 0; i < ch.branch_count(); ++i) {
    s += ch.branch(i).weights().tail_mass;
  }
  return s;
}

int total_series_terms(const MrcChannel& ch) {
  int n = 0;
  for (int i = 0; i < ch.branch_count(); ++i) {
    n += static_cast<int>(ch.branch(i).weights().logw.size());
  }
  return n;
}

std::vector<cd> convolve(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> out(a.size() + b.size() - 1, cd(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    const cd ai = a[i];
    cd* dst = out.data() + i;
    for (size_t k = 0; k < b.size(); ++k) dst[k] += ai * b[k];
  }
  return out;
}

// One branch kernel sampled along s = c + i k step for k = 0..m:
//
//   S(s) * (-1/s) * Gamma(h+s) * e^{(h+s) log_arg}
//
// where S(s) = sum_j w_j Gamma(j+1-h-s) / Gamma(j+1) folds the fading
// mixture.  The Gamma ratio is advanced by the forward recurrence
// r_{j+1} = r_j (j+1-h-s)/(j+1), which keeps every term on the scale of
// w_j, and -1/s is Gamma(-s)/Gamma(1-s).  Negative k follows by
// conjugation since all parameters are real.
std::vector<cd> branch_half_line(const SingleLinkChannel& br, double c,
                                 double step, int m, double log_arg) {
  const double h = br.h();
  const std::vector<double>& logw = br.weights().logw;
  const size_t terms = logw.size();
  std::vector<double> w(terms), fre(terms), finv(terms);
  for (size_t j = 0; j < terms; ++j) {
    w[j] = std::exp(logw[j]);
    finv[j] = 1.0 / (static_cast<double>(j) + 1.0);
    fre[j] = (static_cast<double>(j) + 1.0 - h - c) * finv[j];
  }
  std::vector<cd> out(m + 1);
  const double arg_mag = std::exp((h + c) * log_arg);
  for (int k = 0; k <= m; ++k) {
    const double t = k * step;
    const cd s(c, t);
    cd r = std::exp(sf::ln_gamma(cd(1.0 - h - c, -t)));
    cd acc(0.0, 0.0);
    for (size_t j = 0; j < terms; ++j) {
      acc += w[j] * r;
      r *= cd(fre[j], -t * finv[j]);
    }
    const cd kernel = acc * (-1.0 / s) * std::exp(sf::ln_gamma(cd(h + c, t)));
    out[k] = kernel * std::polar(arg_mag, t * log_arg);
  }
  return out;
}

std::vector<cd> mirror_axis(const std::vector<cd>& half) {
  const int m = static_cast<int>(half.size()) - 1;
  std::vector<cd> full(2 * m + 1);
  for (int k = 0; k <= m; ++k) {
    full[m + k] = half[k];
    full[m - k] = std::conj(half[k]);
  }
  return full;
}

// Convolution of all branch contour tables with the x-free argument parts
// folded in.  Branches with identical fading parameters share one table.
std::vector<cd> branch_convolution(const MrcChannel& ch, double c, double step,
                                   int m, const std::vector<double>& log_arg) {
  const int n = ch.branch_count();
  std::vector<std::vector<cd>> axes(n);
  for (int i = 0; i < n; ++i) {
    int same = -1;
    for (int r = 0; r < i; ++r) {
      const FtrParams& pa = ch.branch(r).fading();
      const FtrParams& pb = ch.branch(i).fading();
      if (pa.m == pb.m && pa.k == pb.k && pa.delta == pb.delta &&
          log_arg[r] == log_arg[i]) {
        same = r;
        break;
      }
    }
    axes[i] =
        same >= 0
            ? axes[same]
            : mirror_axis(branch_half_line(ch.branch(i), c, step, m, log_arg[i]));
  }
  std::vector<cd> b = std::move(axes[0]);
  for (int i = 1; i < n; ++i) b = convolve(b, axes[i]);
  return b;
}

// The combined-SNR distribution (or a Laplace-type transform of it) as a
// single pass over the convolved contour tables.  The outer factor
// Gamma(num_a0 + sum s_i) / Gamma(den_a0 + sum s_i) couples the branch
// variables only through their sum, and the query argument x enters each
// branch as x^{h+s}, i.e. as one geometric phase per grid node; so after
// precomputing B(v) * W(v) once, any x costs one linear sweep.
class ContourDistribution {
 public:
  ContourDistribution(const MrcChannel& ch, double step, double t_max,
                      double den_a0, double num_a0,
                      const std::vector<double>& log_arg)
      : step_(step) {
    const int n = ch.branch_count();
    const double h = ch.h();
    const double c = branch_abscissa(h);
    const int m = static_cast<int>(std::ceil(t_max / step));
    power_ = n * (h + c);
    scale_ = std::pow(h * step / (2.0 * kPi), n);
    std::vector<cd> b = branch_convolution(ch, c, step, m, log_arg);
    const int center = n * m;
    const double shift = n * c;
    pw_.resize(b.size());
    for (size_t k = 0; k < b.size(); ++k) {
      const double v = (static_cast<int>(k) - center) * step;
      cd lw = -sf::ln_gamma(cd(den_a0 + shift, v));
      if (std::isfinite(num_a0)) {
        lw += sf::ln_gamma(cd(num_a0 + shift, v));
      }
      pw_[k] = b[k] * std::exp(lw);
      mag_sum_ += std::abs(pw_[k]);
    }
  }

  // Re sum_v P(v) x^{i v} times the argument power and contour scale.
  double eval(double log_x) const {
    const int total = static_cast<int>(pw_.size());
    const int center = total / 2;
    const double ang = step_ * log_x;
    cd acc(0.0, 0.0);
    const cd rot = std::polar(1.0, ang);
    cd ph(0.0, 0.0);
    for (int k = 0; k < total; ++k) {
      if ((k & 511) == 0) ph = std::polar(1.0, (k - center) * ang);
      acc += pw_[k] * ph;
      ph *= rot;
    }
    return scale_ * std::exp(power_ * log_x) * acc.real();
  }

  // Companion sum of magnitudes: the cancellation floor of eval.
  double mag(double log_x) const {
    return scale_ * std::exp(power_ * log_x) * mag_sum_;
  }

  long long nodes() const { return static_cast<long long>(pw_.size()); }

 private:
  double step_;
  double power_ = 0.0;
  double scale_ = 1.0;
  double mag_sum_ = 0.0;
  std::vector<cd> pw_;
};

// Pairs a production-grid evaluation with one at doubled spacing so each
// query carries an observed discretization error, on top of the analytic
// trapezoid bound and the rounding floor.
class DistEvaluator {
 public:
  DistEvaluator(const MrcChannel& ch, const MrcControl& ctl, double decay,
                double den_a0, double num_a0,
                const std::vector<double>& log_arg)
      : margin_(strip_margin(ch.h())),
        step_(ctl.refine > 0 ? ctl.grid_step / 2.0 : ctl.grid_step) {
    const double t_max = tail_length(ctl.tail_tol, decay);
    fine_.emplace(ch, step_, t_max, den_a0, num_a0, log_arg);
    if (ctl.refine > 0) {
      coarse_.emplace(ch, ctl.grid_step, t_max, den_a0, num_a0, log_arg);
    }
  }

  double eval(double log_x, double* err, double* mag) const {
    const double v = fine_->eval(log_x);
    const double mg = fine_->mag(log_x);
    if (err != nullptr) {
      double e = mg * (std::exp(-2.0 * kPi * margin_ / step_) + 2.3e-16);
      if (coarse_) e += std::abs(v - coarse_->eval(log_x));
      *err = e;
    }
    if (mag != nullptr) *mag = mg;
    return v;
  }

  long long nodes() const {
    return fine_->nodes() + (coarse_ ? coarse_->nodes() : 0);
  }

 private:
  double margin_;
  double step_;
  std::optional<ContourDistribution> fine_;
  std::optional<ContourDistribution> coarse_;
};

std::vector<double> log_args_cdf(const MrcChannel& ch) {
  std::vector<double> lb(ch.branch_count());
  for (int i = 0; i < ch.branch_count(); ++i) {
    lb[i] = -std::log(ch.branch(i).xi());
  }
  return lb;
}

void attach_cancellation_note(MetricResult& r, double mag) {
  if (mag > 1e8 * std::max(std::abs(r.value), 1e-300)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "heavy contour cancellation (magnitude sum %.1e)", mag);
    if (!r.note.empty()) r.note += "; ";
    r.note += buf;
  }
}

void require_modulation(const ModulationSpec& mod, const char* where) {
  if (!(mod.p > 0.0) || !(mod.q > 0.0) || !std::isfinite(mod.p) ||
      !std::isfinite(mod.q)) {
    throw std::invalid_argument(std::string(where) +
                                ": modulation constants must be positive");
  }
}

// ---------------------------------------------------------------------------
// High-SNR expansion.  Closing each branch contour to the right, the leading
// pole of branch i with mixture index j sits at s = 0 when j+1 > h (residue
// Gamma(j+1-h) Gamma(h) against argument power h) and at s = j+1-h otherwise
// (residue collapsing to w_j/(h-j-1) against argument power j+1).  Grouping
// equal powers leaves a handful of modes per branch; the outer factor
// couples the modes of different branches through the sum of their pole
// offsets g.
struct AsymMode {
  double e;        // argument exponent: h, or j+1
  double g;        // pole offset: 0, or j+1-h
  double log_amp;  // log of the positive amplitude, h included
};

std::vector<AsymMode> asym_modes(const SingleLinkChannel& br, bool* collision) {
  const double h = br.h();
  const std::vector<double>& logw = br.weights().logw;
  std::vector<AsymMode> modes;
  sf::LogSum head;
  for (size_t j = 0; j < logw.size(); ++j) {
    const double d = static_cast<double>(j) + 1.0 - h;
    if (std::abs(d) < 1e-6) {
      *collision = true;  // double pole; the omitted term carries log z
      continue;
    }
    if (d > 0.0) {
      head.add(logw[j] - sf::ln_gamma_real(static_cast<double>(j) + 1.0) +
               sf::ln_gamma_real(d));
    } else {
      modes.push_back({static_cast<double>(j) + 1.0, d,
                       std::log(h) + logw[j] - std::log(-d)});
    }
  }
  const double a = head.log_total();
  if (a > -std::numeric_limits<double>::infinity()) {
    modes.push_back({h, 0.0, std::log(h) + sf::ln_gamma_real(h) + a});
  }
  return modes;
}

// log of sum over all mode tuples; p = NaN gives the distribution expansion,
// finite p the error-probability one (outer ratio Gamma(p+E)/Gamma(1+E)).
double asym_log_sum(const std::vector<std::vector<AsymMode>>& modes,
                    const std::vector<double>& log_z, double lh, double p,
                    long long* tuples) {
  const int n = static_cast<int>(modes.size());
  std::vector<int> idx(n, 0);
  sf::LogSum out;
  long long count = 0;
  while (true) {
    double lsum = 0.0;
    double g = 0.0;
    for (int i = 0; i < n; ++i) {
      const AsymMode& md = modes[i][idx[i]];
      lsum += md.log_amp + md.e * log_z[i];
      g += md.g;
    }
    const double e_total = lh + g;
    double outer = -sf::ln_gamma_real(1.0 + e_total);
    if (std::isfinite(p)) outer += sf::ln_gamma_real(p + e_total);
    out.add(lsum + outer);
    ++count;
    int i = 0;
    while (i < n && ++idx[i] == static_cast<int>(modes[i].size())) {
      idx[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
  if (tuples != nullptr) *tuples = count;
  return out.log_total();
}

// Relative size of the first neglected order: per branch, the gap between
// the two smallest argument exponents, evaluated at its argument.
double asym_next_order(const std::vector<std::vector<AsymMode>>& modes,
                       const std::vector<double>& log_z) {
  double rel = 0.0;
  for (size_t i = 0; i < modes.size(); ++i) {
    double e1 = std::numeric_limits<double>::infinity();
    double e2 = e1;
    for (const AsymMode& md : modes[i]) {
      if (md.e < e1) {
        e2 = e1;
        e1 = md.e;
      } else if (md.e < e2) {
        e2 = md.e;
      }
    }
    const double gap = std::isfinite(e2) ? e2 - e1 : 1.0;
    rel += std::exp(std::min(0.0, gap * log_z[i]));
  }
  return std::min(1.0, rel);
}

MetricResult asym_metric(const MrcChannel& ch, const std::vector<double>& log_z,
                         double p, double log_extra) {
  bool collision = false;
  std::vector<std::vector<AsymMode>> modes(ch.branch_count());
  for (int i = 0; i < ch.branch_count(); ++i) {
    modes[i] = asym_modes(ch.branch(i), &collision);
  }
  long long tuples = 0;
  const double lv =
      asym_log_sum(modes, log_z, ch.branch_count() * ch.h(), p, &tuples) +
      log_extra;
  MetricResult r = make_metric(std::exp(lv));
  r.evaluations = tuples;
  r.series_terms = total_series_terms(ch);
  r.error_abs = r.value * asym_next_order(modes, log_z);
  r.converged = true;
  r.note = "leading-order high-SNR expansion";
  if (collision) {
    r.note +=
        "; mixture terms with j+1 = phi^2/2 omitted (degenerate pole)";
  }
  clamp_unit_interval(r);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

MrcChannel::MrcChannel(const std::vector<FtrParams>& branches,
                       const PointingGeometry& pointing, double gamma0,
                       const SeriesControl& series)
    : pointing_(pointing), gamma0_(gamma0) {
  if (branches.empty() || branches.size() > 4) {
    throw std::invalid_argument("MrcChannel: supports one to four branches");
  }
  branches_.reserve(branches.size());
  for (const FtrParams& p : branches) {
    branches_.emplace_back(p, pointing, gamma0, series);
  }
}

MrcChannel MrcChannel::with_gamma0(double gamma0) const {
  MrcChannel copy(*this);
  copy.gamma0_ = gamma0;
  for (SingleLinkChannel& b : copy.branches_) b = b.with_gamma0(gamma0);
  return copy;
}

namespace {

// Shared body of the distribution metrics: a0 = Lh for the density contour,
// 1 + Lh for the distribution; the density divides the contour value by x.
MetricResult dist_metric(const MrcChannel& ch, double x,
                         const MrcControl& control, bool density) {
  const double a0 =
      (density ? 0.0 : 1.0) + ch.branch_count() * ch.h();
  DistEvaluator de(ch, control, kPi / 2.0, a0, kNan, log_args_cdf(ch));
  double err = 0.0;
  double mag = 0.0;
  double v = de.eval(std::log(x), &err, &mag);
  if (density) {
    v /= x;
    err /= x;
    mag /= x;
  }
  MetricResult r = make_metric(v);
  r.error_abs = err + tail_mass_sum(ch);
  r.series_terms = total_series_terms(ch);
  r.evaluations = de.nodes();
  r.refinements = control.refine > 0 ? 1 : 0;
  r.converged = r.error_abs <= 1e-8 + 1e-6 * std::abs(v);
  attach_cancellation_note(r, mag);
  if (density) {
    r.raw_value = r.value;
    if (r.value < 0.0) {
      r.value = 0.0;
      r.clamped = true;
    }
  } else {
    clamp_unit_interval(r);
  }
  return r;
}

}  // namespace

MetricResult mrc_snr_cdf(const MrcChannel& ch, double x,
                         const MrcControl& control) {
  if (!(x > 0.0)) {
    MetricResult r = make_metric(0.0);
    r.note = "argument at or below zero";
    return r;
  }
  return dist_metric(ch, x, control, false);
}

MetricResult mrc_snr_pdf(const MrcChannel& ch, double x,
                         const MrcControl& control) {
  if (!(x > 0.0)) {
    MetricResult r = make_metric(0.0);
    r.note = "argument at or below zero";
    return r;
  }
  return dist_metric(ch, x, control, true);
}

MetricResult mrc_snr_survival(const MrcChannel& ch, double x,
                              const MrcControl& control) {
  if (!(x > 0.0)) {
    MetricResult r = make_metric(1.0);
    r.note = "argument at or below zero";
    return r;
  }
  MetricResult r = mrc_snr_cdf(ch, x, control);
  r.raw_value = 1.0 - r.raw_value;
  r.value = std::clamp(r.raw_value, 0.0, 1.0);
  r.clamped = r.value != r.raw_value;
  return r;
}

MetricResult outage_mrc(const MrcChannel& ch, double threshold,
                        const MrcControl& control) {
  if (!(threshold > 0.0)) {
    MetricResult r = make_metric(0.0);
    r.note = "threshold at or below zero";
    return r;
  }
  return dist_metric(ch, threshold, control, false);
}

MetricResult outage_mrc_asymptotic(const MrcChannel& ch, double threshold) {
  if (!(threshold > 0.0)) {
    MetricResult r = make_metric(0.0);
    r.note = "threshold at or below zero";
    return r;
  }
  std::vector<double> log_z(ch.branch_count());
  for (int i = 0; i < ch.branch_count(); ++i) {
    log_z[i] = std::log(threshold) - std::log(ch.branch(i).xi());
  }
  return asym_metric(ch, log_z, kNan, 0.0);
}

MetricResult ber_mrc(const MrcChannel& ch, const ModulationSpec& mod,
                     const MrcControl& control) {
  require_modulation(mod, "ber_mrc");
  const int n = ch.branch_count();
  std::vector<double> lb(n);
  for (int i = 0; i < n; ++i) {
    lb[i] = -std::log(ch.branch(i).xi() * mod.q);
  }
  // The outer ratio Gamma(p+.)/Gamma(1+.) has no exponential growth, so the
  // per-branch decay stays at the full kernel rate pi.
  DistEvaluator de(ch, control, kPi, 1.0 + n * ch.h(), mod.p + n * ch.h(), lb);
  double err = 0.0;
  double mag = 0.0;
  const double raw = de.eval(0.0, &err, &mag);
  const double coeff = 0.5 * std::exp(-sf::ln_gamma_real(mod.p));
  MetricResult r = make_metric(coeff * raw);
  r.error_abs = coeff * err + 0.5 * tail_mass_sum(ch);
  r.series_terms = total_series_terms(ch);
  r.evaluations = de.nodes();
  r.refinements = control.refine > 0 ? 1 : 0;
  r.converged = r.error_abs <= 1e-10 + 1e-6 * std::abs(r.value);
  attach_cancellation_note(r, coeff * mag);
  clamp_unit_interval(r);
  return r;
}

MetricResult ber_mrc_quadrature(const MrcChannel& ch, const ModulationSpec& mod,
                                const MrcControl& control) {
  require_modulation(mod, "ber_mrc_quadrature");
  DistEvaluator de(ch, control, kPi / 2.0, 1.0 + ch.branch_count() * ch.h(),
                   kNan, log_args_cdf(ch));
  // substitute x = v^2 in the conditional error probability integral:
  // q^p/Gamma(p) int_0^V e^{-q v^2} v^{2p-1} F(v^2) dv plus the clipped tail
  const double vmax = std::sqrt(45.0 / mod.q);
  const sf::GaussLegendreRule& rule = sf::gauss_legendre(20);
  long long evals = 0;
  const auto pass = [&](int panels, double* err_acc) {
    const double width = vmax / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * width;
      const double half = 0.5 * width;
      for (size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = mid + half * rule.nodes[k];
        const double wt = half * rule.weights[k];
        double ferr = 0.0;
        double f =
            std::clamp(de.eval(2.0 * std::log(v), &ferr, nullptr), 0.0, 1.0);
        const double envelope =
            std::exp(-mod.q * v * v + (2.0 * mod.p - 1.0) * std::log(v));
        acc += wt * envelope * f;
        if (err_acc != nullptr) *err_acc += wt * envelope * ferr;
        ++evals;
      }
    }
    return acc;
  };
  double prev = pass(8, nullptr);
  double cur = prev;
  double cdf_err = 0.0;
  int refinements = 0;
  for (int panels = 16; panels <= 128; panels *= 2) {
    cdf_err = 0.0;
    cur = pass(panels, &cdf_err);
    ++refinements;
    if (std::abs(cur - prev) <= 1e-9 * std::max(std::abs(cur), 1e-300)) break;
    prev = cur;
  }
  const double coeff =
      std::exp(mod.p * std::log(mod.q) - sf::ln_gamma_real(mod.p));
  const double tail =
      0.5 * std::exp(sf::upper_inc_gamma_log(mod.p, mod.q * vmax * vmax) -
                     sf::ln_gamma_real(mod.p));
  MetricResult r = make_metric(coeff * cur + tail);
  r.error_abs = coeff * (std::abs(cur - prev) + cdf_err) + tail +
                0.5 * tail_mass_sum(ch);
  r.series_terms = total_series_terms(ch);
  r.evaluations = evals;
  r.refinements = refinements;
  r.converged = r.error_abs <= 1e-10 + 1e-5 * std::abs(r.value);
  clamp_unit_interval(r);
  return r;
}

MetricResult ber_mrc_asymptotic(const MrcChannel& ch,
                                const ModulationSpec& mod) {
  require_modulation(mod, "ber_mrc_asymptotic");
  std::vector<double> log_z(ch.branch_count());
  for (int i = 0; i < ch.branch_count(); ++i) {
    log_z[i] = -std::log(ch.branch(i).xi() * mod.q);
  }
  const double log_extra = -kLn2 - sf::ln_gamma_real(mod.p);
  return asym_metric(ch, log_z, mod.p, log_extra);
}

// ---------------------------------------------------------------------------
// Ergodic capacity, closed path.  ln(1+x) enters as one extra contour
// variable with kernel Gamma(-s)^2 Gamma(1+s) / Gamma(1-s); damping the SNR
// integral by e^{-lam x} makes the term-by-term x-integral converge and
// yields the outer ratio Gamma(Lh + sum s - s_t) / Gamma(Lh + sum s) with
// branch arguments 1/(xi_i lam) and last argument lam, exact as lam -> 0.
// lam only enters through geometric phases, so the tables are reused across
// the lam-sensitivity evaluations.

namespace {

struct CapacityTables {
  double step = 0.0;
  double c = 0.0;
  int m = 0;
  std::vector<cd> bw;    // branch convolution times 1/Gamma(Lh+Lc+iv)
  std::vector<cd> taxis; // ln(1+x) kernel along -1/2 + i t
  std::vector<cd> wnum;  // Gamma(Lh+Lc+1/2 + i d step) on the difference grid
};

CapacityTables capacity_tables(const MrcChannel& ch, double step,
                               double t_max) {
  CapacityTables T;
  const int n = ch.branch_count();
  const double h = ch.h();
  T.step = step;
  T.c = branch_abscissa(h);
  T.m = static_cast<int>(std::ceil(t_max / step));
  T.bw = branch_convolution(ch, T.c, step, T.m, log_args_cdf(ch));
  const int center = n * T.m;
  const double rho_den = n * (h + T.c);
  for (size_t k = 0; k < T.bw.size(); ++k) {
    const double v = (static_cast<int>(k) - center) * step;
    T.bw[k] *= std::exp(-sf::ln_gamma(cd(rho_den, v)));
  }
  std::vector<cd> half(T.m + 1);
  for (int k = 0; k <= T.m; ++k) {
    const cd s(-0.5, k * step);
    half[k] = std::exp(2.0 * sf::ln_gamma(-s) + sf::ln_gamma(1.0 + s) -
                       sf::ln_gamma(1.0 - s));
  }
  T.taxis = mirror_axis(half);
  const int dmax = center + T.m;
  const double rho_num = rho_den + 0.5;
  std::vector<cd> whalf(dmax + 1);
  for (int d = 0; d <= dmax; ++d) {
    whalf[d] = std::exp(sf::ln_gamma(cd(rho_num, d * step)));
  }
  T.wnum = mirror_axis(whalf);
  return T;
}

double capacity_pass(const CapacityTables& T, int n, double h, double log_lam,
                     double* mag) {
  const int K = (static_cast<int>(T.bw.size()) - 1) / 2;
  const int m = T.m;
  const int dmax = K + m;
  std::vector<cd> pt(2 * m + 1);
  for (int j = 0; j <= 2 * m; ++j) {
    pt[j] = T.taxis[j] * std::polar(1.0, (j - m) * T.step * log_lam);
  }
  cd tot(0.0, 0.0);
  double mg = 0.0;
  for (int kv = 0; kv < static_cast<int>(T.bw.size()); ++kv) {
    cd inner(0.0, 0.0);
    double inner_mag = 0.0;
    const int off = dmax + m + kv - K;
    for (int j = 0; j <= 2 * m; ++j) {
      const cd q = pt[j] * T.wnum[off - j];
      inner += q;
      inner_mag += std::abs(q);
    }
    const cd pb = T.bw[kv] * std::polar(1.0, -(kv - K) * T.step * log_lam);
    tot += pb * inner;
    mg += std::abs(pb) * inner_mag;
  }
  const double scale =
      std::pow(h * T.step / (2.0 * kPi), n) * (T.step / (2.0 * kPi));
  const double outside = std::exp(-(n * (h + T.c) + 0.5) * log_lam);
  if (mag != nullptr) *mag = scale * outside * mg / kLn2;
  return scale * outside * tot.real() / kLn2;
}

}  // namespace

MetricResult capacity_mrc(const MrcChannel& ch, double epsilon,
                          const MrcControl& control) {
  const int n = ch.branch_count();
  if (epsilon <= 0.0) epsilon = n <= 2 ? 1e-6 : 1e-5;
  if (!(epsilon < 0.01) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("capacity_mrc: epsilon must be in (0, 0.01)");
  }
  double xscale = 0.0;
  for (int i = 0; i < n; ++i) xscale += ch.branch(i).xi();
  const double log_lam = std::log(epsilon) - std::log(xscale);
  const double t_max = tail_length(control.tail_tol, kPi / 2.0);
  const double fine_step =
      control.refine > 0 ? control.grid_step / 2.0 : control.grid_step;
  const CapacityTables fine = capacity_tables(ch, fine_step, t_max);
  double mag = 0.0;
  const double base = capacity_pass(fine, n, ch.h(), log_lam, &mag);
  double grid_err = mag * (std::exp(-2.0 * kPi *
                                    std::min(strip_margin(ch.h()), 0.5) /
                                    fine_step) +
                           2.3e-16);
  long long evals = static_cast<long long>(fine.bw.size()) *
                    (2 * static_cast<long long>(fine.m) + 1);
  if (control.refine > 0) {
    const CapacityTables coarse =
        capacity_tables(ch, control.grid_step, t_max);
    grid_err += std::abs(base - capacity_pass(coarse, n, ch.h(), log_lam,
                                              nullptr));
    evals += static_cast<long long>(coarse.bw.size()) *
             (2 * static_cast<long long>(coarse.m) + 1);
  }
  const double sens =
      capacity_pass(fine, n, ch.h(), log_lam - std::log(10.0), nullptr);
  const double reg_err = (10.0 / 9.0) * std::abs(base - sens);
  MetricResult r = make_metric(base);
  r.error_abs = grid_err + reg_err + tail_mass_sum(ch) * (1.0 + std::abs(base));
  r.series_terms = total_series_terms(ch);
  r.evaluations = evals;
  r.refinements = control.refine > 0 ? 1 : 0;
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "damping eps=%.1e; value shifts %.2e at eps/10", epsilon,
                sens - base);
  r.note = buf;
  r.converged = r.error_abs <= 1e-6 + 1e-3 * std::abs(base);
  attach_cancellation_note(r, mag);
  r.raw_value = r.value;
  if (r.value < 0.0) {
    r.value = 0.0;
    r.clamped = true;
  }
  return r;
}

MetricResult capacity_mrc_quadrature(const MrcChannel& ch,
                                     const MrcControl& control) {
  DistEvaluator de(ch, control, kPi / 2.0, 1.0 + ch.branch_count() * ch.h(),
                   kNan, log_args_cdf(ch));
  double xscale = 0.0;
  double xi_max = 0.0;
  for (int i = 0; i < ch.branch_count(); ++i) {
    xscale += ch.branch(i).xi();
    xi_max = std::max(xi_max, ch.branch(i).xi());
  }
  const auto survival = [&](double x, double* err) {
    double e = 0.0;
    const double s = 1.0 - de.eval(std::log(x), &e, nullptr);
    if (err != nullptr) *err = e;
    return std::clamp(s, 0.0, 1.0);
  };
  std::vector<double> edges{0.0};
  double edge = xscale / 64.0;
  double s_last = 1.0;
  for (int k = 0; k < 96; ++k) {
    edges.push_back(edge);
    s_last = survival(edge, nullptr);
    if (edge > xscale && s_last < 1e-10) break;
    edge *= 2.0;
  }
  const sf::GaussLegendreRule& lo = sf::gauss_legendre(16);
  const sf::GaussLegendreRule& hi = sf::gauss_legendre(24);
  double coarse = 0.0;
  double fine = 0.0;
  double cdf_err = 0.0;
  long long evals = 0;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (size_t k = 0; k < lo.nodes.size(); ++k) {
      const double x = mid + half * lo.nodes[k];
      coarse += half * lo.weights[k] * survival(x, nullptr) / (1.0 + x);
      ++evals;
    }
    for (size_t k = 0; k < hi.nodes.size(); ++k) {
      const double x = mid + half * hi.nodes[k];
      double e = 0.0;
      fine += half * hi.weights[k] * survival(x, &e) / (1.0 + x);
      cdf_err += half * hi.weights[k] * e / (1.0 + x);
      ++evals;
    }
  }
  const double tail_bound = s_last * xi_max / (1.0 + edges.back());
  MetricResult r = make_metric(fine / kLn2);
  r.error_abs = (std::abs(fine - coarse) + cdf_err + tail_bound) / kLn2 +
                tail_mass_sum(ch);
  r.series_terms = total_series_terms(ch);
  r.evaluations = evals;
  r.refinements = control.refine > 0 ? 1 : 0;
  r.converged = r.error_abs <= 1e-6 + 1e-4 * std::abs(r.value);
  r.raw_value = r.value;
  if (r.value < 0.0) {
    r.value = 0.0;
    r.clamped = true;
  }
  return r;
}

double diversity_order(const MrcChannel& ch) {
  return ch.branch_count() * std::min(1.0, ch.h());
}

mb::FoxHSpec mrc_cdf_term_spec(const MrcChannel& ch,
                               const std::vector<int>& indices, double x) {
  if (static_cast<int>(indices.size()) != ch.branch_count()) {
    throw std::invalid_argument("mrc_cdf_term_spec: one index per branch");
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("mrc_cdf_term_spec: argument must be positive");
  }
  const double h = ch.h();
  const int n = ch.branch_count();
  std::vector<double> args(n);
  std::vector<mb::GammaFactorGroup> axes(n);
  double lp = 0.0;
  for (int i = 0; i < n; ++i) {
    const SingleLinkChannel& b = ch.branch(i);
    const int j = indices[i];
    if (j < 0 || j >= static_cast<int>(b.weights().logw.size())) {
      throw std::invalid_argument(
          "mrc_cdf_term_spec: index beyond the truncated mixture");
    }
    args[i] = x / b.xi();
    axes[i] = mb::GammaFactorGroup::from_mnpq(
        2, 1, {{1.0 - h, 1.0}, {1.0, 1.0}},
        {{static_cast<double>(j) + 1.0 - h, 1.0}, {0.0, 1.0}});
    lp += b.weights().logw[j] -
          sf::ln_gamma_real(static_cast<double>(j) + 1.0) + std::log(h) +
          h * std::log(args[i]);
  }
  mb::OuterFactor outer;
  outer.a0 = 1.0 + n * h;
  outer.weights.assign(n, 1);
  outer.numerator = false;
  return mb::FoxHSpec(std::move(args), std::move(axes), {outer}, {}, lp);
}

}  // namespace thz
