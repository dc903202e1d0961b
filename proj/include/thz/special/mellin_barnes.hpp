// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "thz/metric.hpp"

namespace thz::mb {

// One factor Γ(a ± scale·s).  Sign and position (numerator or denominator
// of the integrand kernel) are determined by which list of a
// GammaFactorGroup the factor sits in.
struct GammaFactor {
  double a = 0.0;
  double scale = 1.0;
};

// Integrand kernel for one integration variable,
//
//   θ(s) = Π Γ(b - B s) · Π Γ(1 - a + A s)
//          ---------------------------------
//          Π Γ(1 - b + B s) · Π Γ(a - A s)
//
// assembled from the two parameter rows of a Mellin-Barnes symbol:
//   num_bottom : first m entries of the bottom row  -> Γ(b - B s)
//   num_top    : first n entries of the top row     -> Γ(1 - a + A s)
//   den_bottom : remaining bottom-row entries       -> Γ(1 - b + B s)
//   den_top    : remaining top-row entries          -> Γ(a - A s)
struct GammaFactorGroup {
  std::vector<GammaFactor> num_top;
  std::vector<GammaFactor> num_bottom;
  std::vector<GammaFactor> den_top;
  std::vector<GammaFactor> den_bottom;

  static GammaFactorGroup from_mnpq(int m, int n,
                                    const std::vector<GammaFactor>& top_row,
                                    const std::vector<GammaFactor>& bottom_row);

  // A valid contour satisfies strip_lower() < Re s < strip_upper().
  double strip_lower() const;  // -inf when num_top is empty
  double strip_upper() const;  // +inf when num_bottom is empty

  // k such that |θ(c+it)| ~ |t|^α exp(-(π/2)·k·|t|) for large |t|.
  double decay_scale() const;

  // log θ(s).  Real part is -inf when a denominator factor sits exactly on
  // a pole (the kernel value is zero there).
  std::complex<double> ln_eval(std::complex<double> s) const;
};

// Γ(a0 + Σ_i w_i s_i) coupling all integration variables, placed in the
// numerator (numerator=true) or the denominator of the integrand.
struct OuterFactor {
  double a0 = 0.0;
  std::vector<int> weights;
  bool numerator = true;
};

struct QuadratureControl {
  double t_max = 26.0;  // cap on the contour half-length
  int nodes = 18;       // Gauss-Legendre points per panel, at least 15
  double rel_tol = 1e-8;
  int max_refine = 4;
};

// Multidimensional Mellin-Barnes integral over vertical contours
// s_i = c_i + i t_i:
//
//   H = e^{log_prefactor} (2π)^{-N} ∫ Π_i θ_i(s_i) z_i^{s_i} · Π_f Γ_f^{±1} dt
//
// The constructor validates the spec and throws std::invalid_argument when
// any axis has an empty contour strip, a hint falls outside its strip, or
// no contour keeps the numerator outer factors away from their poles.
struct FoxHSpec {
  std::vector<double> args;             // z_i > 0
  std::vector<GammaFactorGroup> axes;   // one kernel per variable
  std::vector<OuterFactor> outer;       // may be empty
  std::vector<double> contour_hints;    // NaN entries mean "choose automatically"
  double log_prefactor = 0.0;

  FoxHSpec(std::vector<double> args_, std::vector<GammaFactorGroup> axes_,
           std::vector<OuterFactor> outer_ = {},
           std::vector<double> contour_hints_ = {}, double log_prefactor_ = 0.0);
};

// Contour abscissas actually used for a spec: hints where given, strip
// midpoints otherwise, shifted if needed so every numerator outer factor
// keeps a positive real argument on the contour.  Exposed for diagnostics.
std::vector<double> resolve_contours(const FoxHSpec& spec);

MetricResult fox_h_multivariate(const FoxHSpec& spec,
                                const QuadratureControl& control = {});

// Classical Meijer G evaluated through the same engine (one variable, all
// scales equal to one).
MetricResult meijer_g(int m, int n, const std::vector<double>& top_row,
                      const std::vector<double>& bottom_row, double z,
                      const QuadratureControl& control = {},
                      double contour_hint = std::numeric_limits<double>::quiet_NaN(),
                      double log_prefactor = 0.0);

// Piecewise-cubic table of v -> lnΓ(rho + iv) on [0, v_max], extended to
// v < 0 by conjugation.  Requires rho >= 0.5, where lnΓ is continuous
// along the vertical line.
class LnGammaLine {
 public:
  LnGammaLine(double rho, double v_max, double step = 0.005);
  std::complex<double> operator()(double v) const;
  double rho() const { return rho_; }

 private:
  double rho_;
  double step_;
  double inv_step_;
  std::vector<std::complex<double>> tab_;
};

}  // namespace thz::mb
