// SPDX-License-Identifier: Apache-2.0
#include "thz/special/mellin_barnes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "thz/special/gamma.hpp"
#include "thz/special/gauss_legendre.hpp"

namespace thz::mb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;
// Smallest admissible real part of a numerator outer factor on the contour.
constexpr double kOuterClearance = 0.05;
// Real part above which lnΓ along a vertical line is branch-cut free, so a
// cubic table of it can be interpolated safely.
constexpr double kInterpRhoMin = 0.6;
constexpr size_t kRefineGridCap = 400000000;

bool on_pole(const std::complex<double>& z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

}  // namespace

GammaFactorGroup GammaFactorGroup::from_mnpq(
    int m, int n, const std::vector<GammaFactor>& top_row,
    const std::vector<GammaFactor>& bottom_row) {
  if (m < 0 || n < 0 || m > static_cast<int>(bottom_row.size()) ||
      n > static_cast<int>(top_row.size())) {
    throw std::invalid_argument("gamma factor group: m/n outside row sizes");
  }
  for (const auto& f : top_row) {
    if (!(f.scale > 0.0)) throw std::invalid_argument("gamma factor scale must be positive");
  }
  for (const auto& f : bottom_row) {
    if (!(f.scale > 0.0)) throw std::invalid_argument("gamma factor scale must be positive");
  }
  GammaFactorGroup g;
  g.num_top.assign(top_row.begin(), top_row.begin() + n);
  g.den_top.assign(top_row.begin() + n, top_row.end());
  g.num_bottom.assign(bottom_row.begin(), bottom_row.begin() + m);
  g.den_bottom.assign(bottom_row.begin() + m, bottom_row.end());
  return g;
}

double GammaFactorGroup::strip_lower() const {
  double lo = -kInf;
  for (const auto& f : num_top) lo = std::max(lo, (f.a - 1.0) / f.scale);
  return lo;
}

double GammaFactorGroup::strip_upper() const {
  double hi = kInf;
  for (const auto& f : num_bottom) hi = std::min(hi, f.a / f.scale);
  return hi;
}

double GammaFactorGroup::decay_scale() const {
  double k = 0.0;
  for (const auto& f : num_top) k += f.scale;
  for (const auto& f : num_bottom) k += f.scale;
  for (const auto& f : den_top) k -= f.scale;
  for (const auto& f : den_bottom) k -= f.scale;
  return k;
}

std::complex<double> GammaFactorGroup::ln_eval(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (const auto& f : num_top) acc += sf::ln_gamma(1.0 - f.a + f.scale * s);
  for (const auto& f : num_bottom) acc += sf::ln_gamma(f.a - f.scale * s);
  for (const auto& f : den_top) {
    const std::complex<double> z = f.a - f.scale * s;
    if (on_pole(z)) return {-kInf, 0.0};
    acc -= sf::ln_gamma(z);
  }
  for (const auto& f : den_bottom) {
    const std::complex<double> z = 1.0 - f.a + f.scale * s;
    if (on_pole(z)) return {-kInf, 0.0};
    acc -= sf::ln_gamma(z);
  }
  return acc;
}

FoxHSpec::FoxHSpec(std::vector<double> args_, std::vector<GammaFactorGroup> axes_,
                   std::vector<OuterFactor> outer_, std::vector<double> contour_hints_,
                   double log_prefactor_)
    : args(std::move(args_)),
      axes(std::move(axes_)),
      outer(std::move(outer_)),
      contour_hints(std::move(contour_hints_)),
      log_prefactor(log_prefactor_) {
  const size_t n = axes.size();
  if (n == 0 || n > 4) throw std::invalid_argument("spec needs 1 to 4 variables");
  if (args.size() != n) throw std::invalid_argument("one argument per variable required");
  for (double z : args) {
    if (!(z > 0.0) || !std::isfinite(z)) {
      throw std::invalid_argument("arguments must be positive and finite");
    }
  }
  if (!contour_hints.empty() && contour_hints.size() != n) {
    throw std::invalid_argument("contour hints must match the variable count");
  }
  for (const auto& f : outer) {
    if (f.weights.size() != n) {
      throw std::invalid_argument("outer factor weight vector must match the variable count");
    }
  }
  if (!std::isfinite(log_prefactor)) throw std::invalid_argument("log prefactor must be finite");
  resolve_contours(*this);  // throws when no valid contour exists
}

std::vector<double> resolve_contours(const FoxHSpec& spec) {
  const size_t n = spec.axes.size();
  std::vector<double> lo(n), hi(n), margin(n), c(n);
  for (size_t i = 0; i < n; ++i) {
    lo[i] = spec.axes[i].strip_lower();
    hi[i] = spec.axes[i].strip_upper();
    if (!(lo[i] < hi[i])) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "variable %zu has an empty contour strip", i);
      throw std::invalid_argument(buf);
    }
    const bool bounded = std::isfinite(lo[i]) && std::isfinite(hi[i]);
    margin[i] = bounded ? std::min(0.02 * (hi[i] - lo[i]), 1.0) : 0.25;
    const bool hinted = !spec.contour_hints.empty() && std::isfinite(spec.contour_hints[i]);
    if (hinted) {
      c[i] = spec.contour_hints[i];
      if (!(c[i] > lo[i] && c[i] < hi[i])) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "contour hint for variable %zu outside its strip", i);
        throw std::invalid_argument(buf);
      }
    } else if (bounded) {
      c[i] = 0.5 * (lo[i] + hi[i]);
    } else if (std::isfinite(hi[i])) {
      c[i] = hi[i] - 0.5;
    } else if (std::isfinite(lo[i])) {
      c[i] = lo[i] + 0.5;
    } else {
      c[i] = 0.0;
    }
  }
  // Shift contours so every numerator outer factor keeps Re(argument) positive.
  for (const auto& f : spec.outer) {
    if (!f.numerator) continue;
    double rho = f.a0;
    for (size_t i = 0; i < n; ++i) rho += f.weights[i] * c[i];
    if (rho >= kOuterClearance) continue;
    double need = kOuterClearance - rho;
    std::vector<double> room(n, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (f.weights[i] > 0) {
        room[i] = std::max(0.0, (hi[i] - margin[i]) - c[i]);
      } else if (f.weights[i] < 0) {
        room[i] = std::max(0.0, c[i] - (lo[i] + margin[i]));
      }
      total += std::abs(f.weights[i]) * room[i];
    }
    if (total < need) {
      throw std::invalid_argument("no contour keeps an outer factor away from its poles");
    }
    const double frac = need / total;
    for (size_t i = 0; i < n; ++i) {
      if (f.weights[i] > 0) c[i] += frac * room[i];
      if (f.weights[i] < 0) c[i] -= frac * room[i];
    }
  }
  // A shift for one factor must not have spoiled another.
  for (const auto& f : spec.outer) {
    if (!f.numerator) continue;
    double rho = f.a0;
    for (size_t i = 0; i < n; ++i) rho += f.weights[i] * c[i];
    if (rho < 0.8 * kOuterClearance) {
      throw std::invalid_argument("no contour keeps all outer factors away from their poles");
    }
  }
  return c;
}

LnGammaLine::LnGammaLine(double rho, double v_max, double step)
    : rho_(rho), step_(step), inv_step_(1.0 / step) {
  if (!(rho >= 0.5)) throw std::invalid_argument("lnΓ line table needs Re >= 0.5");
  if (!(v_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("bad lnΓ line table extent");
  const size_t count = static_cast<size_t>(std::ceil(v_max / step)) + 4;
  tab_.resize(count);
  for (size_t k = 0; k < count; ++k) {
    tab_[k] = sf::ln_gamma(std::complex<double>(rho, k * step_));
  }
}

std::complex<double> LnGammaLine::operator()(double v) const {
  if (v < 0.0) return std::conj((*this)(-v));
  double x = v * inv_step_;
  const double last = static_cast<double>(tab_.size() - 3);
  if (x > last) x = last;
  const size_t i1 = static_cast<size_t>(x);
  const double u = x - static_cast<double>(i1);
  const std::complex<double> p0 = tab_[i1 == 0 ? 0 : i1 - 1];
  const std::complex<double> p1 = tab_[i1];
  const std::complex<double> p2 = tab_[i1 + 1];
  const std::complex<double> p3 = tab_[i1 + 2];
  // Catmull-Rom on a uniform grid.
  return 0.5 * (2.0 * p1 + u * ((p2 - p0) +
                u * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                u * (3.0 * (p1 - p2) + p3 - p0))));
}

namespace {

struct AxisGrid {
  std::vector<double> t;
  std::vector<std::complex<double>> val;  // exp(ln integrand piece - shift)
  double shift = 0.0;                     // subtracted log magnitude
};

AxisGrid build_axis(const GammaFactorGroup& g, double z, double c, double t_half,
                    int panels, int nodes, bool half_axis) {
  const sf::GaussLegendreRule& rule = sf::gauss_legendre(nodes);
  const double logz = std::log(z);
  const double a = half_axis ? 0.0 : -t_half;
  const int np = half_axis ? panels : 2 * panels;
  const double width = (t_half - a) / np;
  const double extra = half_axis ? std::log(2.0) : 0.0;
  AxisGrid out;
  const size_t count = static_cast<size_t>(np) * rule.nodes.size();
  out.t.reserve(count);
  std::vector<std::complex<double>> ln;
  ln.reserve(count);
  double peak = -kInf;
  for (int p = 0; p < np; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double hw = 0.5 * width;
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = mid + hw * rule.nodes[k];
      const std::complex<double> s(c, t);
      std::complex<double> lv = g.ln_eval(s);
      lv += s * logz;
      lv += std::log(hw * rule.weights[k]) + extra;
      out.t.push_back(t);
      ln.push_back(lv);
      if (std::isfinite(lv.real())) peak = std::max(peak, lv.real());
    }
  }
  out.shift = std::isfinite(peak) ? peak : 0.0;
  out.val.resize(ln.size());
  for (size_t k = 0; k < ln.size(); ++k) {
    if (std::isfinite(ln[k].real())) {
      out.val[k] = std::exp(ln[k] - out.shift);
    } else {
      out.val[k] = 0.0;
    }
  }
  return out;
}

struct OuterPlan {
  struct Fac {
    double rho = 0.0;
    double sign = 1.0;  // +1 numerator, -1 denominator
    std::vector<int> w;
    int line_index = -1;  // -1 means evaluate lnΓ exactly
  };
  std::vector<Fac> facs;
  std::vector<LnGammaLine> lines;

  std::complex<double> ln_at(const std::vector<double>& v) const {
    std::complex<double> acc = 0.0;
    for (size_t f = 0; f < facs.size(); ++f) {
      const Fac& fac = facs[f];
      std::complex<double> lg;
      if (fac.line_index >= 0) {
        lg = lines[static_cast<size_t>(fac.line_index)](v[f]);
      } else {
        const std::complex<double> zarg(fac.rho, v[f]);
        if (on_pole(zarg)) return {-kInf, 0.0};
        lg = sf::ln_gamma(zarg);
      }
      acc += fac.sign * lg;
    }
    return acc;
  }
};

struct LevelValue {
  double real = 0.0;
  double imag_ratio = 0.0;
  double log_scale = 0.0;  // accumulated shifts; value = real (already scaled)
  double log_mag = -kInf;  // log of the integral of |integrand|
  size_t points = 0;
  bool finite = true;
};

LevelValue integrate_level(const std::vector<AxisGrid>& axes, const OuterPlan& outer,
                           double log_const) {
  const size_t n = axes.size();
  LevelValue lv;
  double shift_sum = log_const;
  for (const auto& g : axes) shift_sum += g.shift;

  std::complex<double> total = 0.0;
  double magsum = 0.0;
  size_t points = 0;
  const AxisGrid& last = axes[n - 1];
  const size_t last_size = last.val.size();
  const bool have_outer = !outer.facs.empty();
  const size_t nf = outer.facs.size();

  std::array<size_t, 4> idx{{0, 0, 0, 0}};
  std::array<size_t, 4> sizes{{1, 1, 1, 1}};
  for (size_t i = 0; i + 1 < n; ++i) sizes[i] = axes[i].val.size();

  std::vector<double> pre_v(nf, 0.0);
  std::vector<double> v(nf, 0.0);
  for (;;) {
    std::complex<double> pre = 1.0;
    for (size_t i = 0; i + 1 < n; ++i) pre *= axes[i].val[idx[i]];
    if (have_outer) {
      for (size_t f = 0; f < nf; ++f) {
        double acc = 0.0;
        for (size_t i = 0; i + 1 < n; ++i) {
          acc += outer.facs[f].w[i] * axes[i].t[idx[i]];
        }
        pre_v[f] = acc;
      }
    }
    std::complex<double> row = 0.0;
    if (pre != 0.0) {
      for (size_t k = 0; k < last_size; ++k) {
        std::complex<double> prod = pre * last.val[k];
        if (prod == 0.0) continue;
        if (have_outer) {
          for (size_t f = 0; f < nf; ++f) {
            v[f] = pre_v[f] + outer.facs[f].w[n - 1] * last.t[k];
          }
          const std::complex<double> lo = outer.ln_at(v);
          if (!std::isfinite(lo.real())) continue;
          prod *= std::exp(lo);
        }
        row += prod;
        magsum += std::abs(prod);
      }
    }
    total += row;
    points += last_size;
    size_t ax = 0;
    while (ax + 1 < n && ++idx[ax] == sizes[ax]) {
      idx[ax] = 0;
      ++ax;
    }
    if (ax + 1 >= n) break;
  }

  lv.points = points;
  if (!std::isfinite(total.real()) || !std::isfinite(total.imag()) ||
      !std::isfinite(magsum)) {
    lv.finite = false;
    return lv;
  }
  if (magsum > 0.0) lv.log_mag = shift_sum + std::log(magsum);
  const double mag = std::abs(total.real());
  lv.imag_ratio = std::abs(total.imag()) / (mag > 0.0 ? mag : 1.0);
  if (total.real() == 0.0) {
    lv.real = 0.0;
  } else {
    const double ln_val = shift_sum + std::log(mag);
    if (ln_val > 700.0) {
      lv.finite = false;
      return lv;
    }
    lv.real = std::copysign(std::exp(ln_val), total.real());
  }
  return lv;
}

}  // namespace

MetricResult fox_h_multivariate(const FoxHSpec& spec, const QuadratureControl& control) {
  if (control.nodes < 15) throw std::invalid_argument("quadrature needs at least 15 nodes per panel");
  if (!(control.rel_tol > 0.0 && control.rel_tol < 1.0)) {
    throw std::invalid_argument("relative tolerance must lie in (0,1)");
  }
  if (!(control.t_max >= 2.0 && control.t_max <= 200.0)) {
    throw std::invalid_argument("contour length cap out of range");
  }
  if (control.max_refine < 0 || control.max_refine > 8) {
    throw std::invalid_argument("refinement count out of range");
  }

  const size_t n = spec.axes.size();
  const std::vector<double> c = resolve_contours(spec);

  // Per-axis contour half-length from the net exponential decay, including
  // the worst-case growth of denominator outer factors.
  std::vector<double> t_half(n), kappa(n);
  std::vector<int> base_panels(n), nodes_per_panel(n);
  double kappa_min = kInf;
  double worst_edge_rel = -kInf;
  bool clipped = false;
  for (size_t i = 0; i < n; ++i) {
    double k = spec.axes[i].decay_scale();
    double den_growth = 0.0;
    for (const auto& f : spec.outer) {
      if (!f.numerator) den_growth += std::abs(f.weights[i]);
    }
    k -= den_growth;
    kappa[i] = 0.5 * M_PI * k;
    if (kappa[i] > 0.15) {
      t_half[i] = std::min(control.t_max, (-std::log(control.rel_tol) + 10.0) / kappa[i]);
      t_half[i] = std::max(t_half[i], 6.0);
    } else {
      t_half[i] = control.t_max;
    }
    kappa_min = std::min(kappa_min, std::max(kappa[i], 0.0));

    // The asymptotic decay rate only sets in once |t| clears the real
    // offsets of the gamma arguments (|Γ(x + it)| stays near Γ(x) until
    // |t| ~ x).  Extend the contour until the magnitude has actually
    // dropped, and remember by how much it failed to when the cap bites.
    const double logz_i = std::log(spec.args[i]);
    const double lift = 0.5 * M_PI * den_growth;
    const auto lmag = [&](double t) {
      const double v = spec.axes[i].ln_eval({c[i], t}).real() + c[i] * logz_i +
                       lift * t;
      return std::isfinite(v) ? v : -kInf;
    };
    double peak = lmag(0.0);
    for (double frac : {0.05, 0.15, 0.3, 0.5, 0.75}) {
      peak = std::max(peak, lmag(frac * t_half[i]));
    }
    const double target = peak + std::log(control.rel_tol) - 5.0;
    while (t_half[i] < control.t_max && lmag(t_half[i]) > target) {
      t_half[i] = std::min(control.t_max, 1.3 * t_half[i] + 0.5);
    }
    const double edge_rel = lmag(t_half[i]) - peak;
    worst_edge_rel = std::max(worst_edge_rel, edge_rel);
    if (edge_rel > std::log(control.rel_tol)) clipped = true;

    const double osc = std::fabs(logz_i);
    int want = static_cast<int>(std::ceil(0.8 * (osc + 9.0)));
    want = std::max(want, control.nodes);
    int panels = std::max(3, static_cast<int>(std::ceil(t_half[i] / 2.0)));
    if (want > 48) {
      panels = static_cast<int>(std::ceil(panels * (want / 48.0)));
      want = 48;
    }
    nodes_per_panel[i] = want;
    base_panels[i] = panels;
  }

  // Outer factor evaluation plan: exact lnΓ for one or two variables,
  // interpolated tables otherwise (when the real parts allow it).
  OuterPlan plan;
  plan.facs.reserve(spec.outer.size());
  bool interp_ok = n >= 3;
  std::vector<double> rho(spec.outer.size());
  for (size_t f = 0; f < spec.outer.size(); ++f) {
    double r = spec.outer[f].a0;
    for (size_t i = 0; i < n; ++i) r += spec.outer[f].weights[i] * c[i];
    rho[f] = r;
    if (r < kInterpRhoMin) interp_ok = false;
  }
  for (size_t f = 0; f < spec.outer.size(); ++f) {
    OuterPlan::Fac fac;
    fac.rho = rho[f];
    fac.sign = spec.outer[f].numerator ? 1.0 : -1.0;
    fac.w = spec.outer[f].weights;
    if (interp_ok) {
      double v_max = 1.0;
      for (size_t i = 0; i < n; ++i) v_max += std::abs(fac.w[i]) * t_half[i];
      fac.line_index = static_cast<int>(plan.lines.size());
      plan.lines.emplace_back(fac.rho, v_max);
    }
    plan.facs.push_back(std::move(fac));
  }

  const double log_const = spec.log_prefactor - static_cast<double>(n) * kLogTwoPi;

  MetricResult res = make_metric(0.0);
  double prev = 0.0;
  double err = std::numeric_limits<double>::quiet_NaN();
  double log_mag = -kInf;
  bool have_prev = false;
  int level = 0;
  std::string note;
  for (; level <= control.max_refine; ++level) {
    size_t projected = 1;
    for (size_t i = 0; i < n; ++i) {
      size_t np = static_cast<size_t>(base_panels[i]) << level;
      size_t sz = np * static_cast<size_t>(nodes_per_panel[i]);
      if (i + 1 < n) sz *= 2;  // full axis
      projected *= sz;
    }
    if (level > 0 && projected > kRefineGridCap) {
      note = "refinement stopped at grid cap";
      break;
    }
    std::vector<AxisGrid> axes;
    axes.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      axes.push_back(build_axis(spec.axes[i], spec.args[i], c[i], t_half[i],
                                base_panels[i] << level, nodes_per_panel[i],
                                i + 1 == n));
    }
    const LevelValue lv = integrate_level(axes, plan, log_const);
    res.evaluations += static_cast<long long>(lv.points);
    if (!lv.finite) {
      res.converged = false;
      res.note = "contour integral overflowed or produced non-finite values";
      res.value = std::numeric_limits<double>::quiet_NaN();
      return res;
    }
    res.value = lv.real;
    log_mag = lv.log_mag;
    if (lv.imag_ratio > 1e-6 && note.empty()) {
      note = "imaginary residual above expected rounding level";
    }
    if (have_prev) {
      err = std::fabs(res.value - prev);
      res.refinements = level;
      if (err <= control.rel_tol * std::max(std::fabs(res.value), 1e-300)) {
        res.converged = true;
        break;
      }
    }
    prev = res.value;
    have_prev = true;
  }
  const double tail = std::isfinite(kappa_min) && kappa_min > 0.0
                          ? std::fabs(res.value) * std::exp(-kappa_min *
                                *std::min_element(t_half.begin(), t_half.end()))
                          : 0.0;
  if (std::isnan(err)) {
    err = std::fabs(res.value);  // single level: no comparison available
    res.converged = false;
    if (note.empty()) note = "no refinement performed; error estimate is crude";
  }
  // Rounding floor from the integral of |integrand| (the refinement
  // difference cannot see cancellation losses), plus the mass beyond the
  // truncation point scaled by how far the edge magnitude had dropped.
  double floor_err = 0.0;
  double trunc_err = 0.0;
  if (std::isfinite(log_mag)) {
    floor_err = std::exp(std::min(log_mag, 690.0)) * 2.3e-16;
    if (worst_edge_rel > -kInf) {
      trunc_err = std::exp(std::min(log_mag + worst_edge_rel, 690.0)) * 2.0 /
                  std::max(kappa_min, 0.5);
    }
  }
  res.error_abs = err + tail + floor_err + trunc_err;
  if (clipped) {
    res.converged = false;
    if (note.empty()) {
      note = "contour clipped at the length cap before the integrand decayed";
    }
  }
  if (!res.converged && note.empty()) note = "refinement limit reached before convergence";
  res.note = note;
  return res;
}

MetricResult meijer_g(int m, int n, const std::vector<double>& top_row,
                      const std::vector<double>& bottom_row, double z,
                      const QuadratureControl& control, double contour_hint,
                      double log_prefactor) {
  std::vector<GammaFactor> top, bottom;
  top.reserve(top_row.size());
  bottom.reserve(bottom_row.size());
  for (double a : top_row) top.push_back({a, 1.0});
  for (double b : bottom_row) bottom.push_back({b, 1.0});
  GammaFactorGroup g = GammaFactorGroup::from_mnpq(m, n, top, bottom);
  FoxHSpec spec({z}, {g}, {}, {contour_hint}, log_prefactor);
  return fox_h_multivariate(spec, control);
}

}  // namespace thz::mb
