// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace thz {

// dB / linear conversions (power ratios) and dBm to watts.
double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watt(double dbm);

// Free-space link parameters.  absorption_per_m is the molecular absorption
// coefficient; the resulting amplitude gain carries exp(-k d / 2).
struct LinkBudget {
  double frequency_hz = 0.0;
  double distance_m = 0.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  double absorption_per_m = 0.0;
};

// Deterministic amplitude gain of the link (spreading + absorption + antennas).
double path_gain(const LinkBudget& link);

// Geometry inputs for the misalignment model: receiver aperture radius,
// beam waist at the receiver plane, and per-axis jitter standard deviation.
struct PointingParams {
  double r1_m = 0.0;
  double wz_m = 0.0;
  double sigma_s_m = 0.0;
};

// Quantities derived from PointingParams that the fading math consumes.
struct PointingGeometry {
  double s0 = 1.0;      // fraction of power collected at perfect alignment
  double wzeq_m = 0.0;  // equivalent beam width
  double phi = 0.0;     // wzeq / (2 sigma_s)
  double h = 0.0;       // phi^2 / 2, the exponent the metric formulas use
};

PointingGeometry derive_pointing(const PointingParams& p);

// Inverse problem: pick a beam waist and jitter that realize a target
// collected fraction s0 and severity ratio phi for the given aperture.
PointingParams pointing_for_targets(double r1_m, double s0, double phi);

// Density of the pointing gain hp on (0, s0]:  (phi^2 / s0^{phi^2}) hp^{phi^2-1}.
double pointing_pdf(const PointingGeometry& g, double hp);

// Fluctuating two-ray fading parameters.  m is the shadowing shape of the
// common specular fluctuation, k the ratio of specular to diffuse power,
// delta in [0,1] the similarity of the two specular components.  The diffuse
// variance is normalized so the mean channel power is one.
struct FtrParams {
  double m = 1.0;
  double k = 0.0;
  double delta = 0.0;
  double sigma2() const { return 0.5 / (1.0 + k); }
};

// ln d_j: the angular-average coefficient of the power-series expansion of
// the fading density, d_j = Gamma(m+j) * (1/2pi) *
//   integral over theta of (1+delta cos t)^j (m+k+k delta cos t)^{-(m+j)}.
double ftr_log_coefficient(const FtrParams& p, int j);
double ftr_coefficient(const FtrParams& p, int j);

// Mixture weights w_j = m^m k^j d_j / (Gamma(m) j!); they sum to one.  The
// series is truncated adaptively once the captured mass reaches 1 - tol.
struct FtrWeights {
  std::vector<double> logw;
  double tail_mass = 0.0;  // mass not captured by the kept terms
  bool truncated = false;  // j_max hit before the tolerance was met
};
FtrWeights ftr_weights(const FtrParams& p, double tol = 1e-9, int j_max = 360);

// Density and distribution of the (unit-mean) fading power.
double ftr_power_pdf(const FtrParams& p, const FtrWeights& w, double x);
double ftr_power_cdf(const FtrParams& p, const FtrWeights& w, double x);

}  // namespace thz
