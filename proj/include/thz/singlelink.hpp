// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "thz/channel.hpp"
#include "thz/metric.hpp"

namespace thz {

// Binary modulation family whose conditional error probability at SNR g is
// Gamma(p, q g) / (2 Gamma(p)).  p = 0.5, q = 1 is coherent BPSK; p = 0.5,
// q = 0.5 covers coherent BFSK; p = 1 gives the differential/non-coherent
// family.
struct ModulationSpec {
  double p = 0.5;
  double q = 1.0;
  static ModulationSpec bpsk() { return {0.5, 1.0}; }
};

// Truncation controls for the fading mixture expansion.
struct SeriesControl {
  int j_max = 360;
  double weight_tol = 1e-9;
};

// SNR model for a single receive antenna: gamma = gamma0 * g * hp^2, where g
// is the unit-mean fluctuating two-ray power gain and hp the pointing gain.
// All distribution formulas reduce to functions of alpha = x / xi with
// xi = 2 gamma0 sigma^2 S0^2.
class SingleLinkChannel {
 public:
  SingleLinkChannel(const FtrParams& fading, const PointingGeometry& pointing,
                    double gamma0, const SeriesControl& series = {});

  const FtrParams& fading() const { return fading_; }
  const PointingGeometry& pointing() const { return pointing_; }
  const FtrWeights& weights() const { return weights_; }
  double gamma0() const { return gamma0_; }
  double xi() const { return xi_; }
  double h() const { return pointing_.h; }

  // Copy of this channel rebased to another mean SNR.  The fading mixture
  // weights depend only on the fading parameters, so they are reused instead
  // of recomputed; sweeps over transmit power rely on this being cheap.
  SingleLinkChannel with_gamma0(double gamma0) const;

 private:
  FtrParams fading_;
  PointingGeometry pointing_;
  double gamma0_;
  double xi_;
  FtrWeights weights_;
};

// Density, distribution, and complementary distribution of the SNR.  The
// survival function is assembled term by term (never as 1 - CDF) so the deep
// tail keeps absolute accuracy.  Arguments x <= 0 return the boundary value.
double snr_pdf(const SingleLinkChannel& ch, double x);
double snr_cdf(const SingleLinkChannel& ch, double x);
double snr_survival(const SingleLinkChannel& ch, double x);

// P(SNR < threshold); threshold is linear, not dB.
MetricResult outage_single(const SingleLinkChannel& ch, double threshold);

// Average BER, twice: the production series of one-variable Mellin-Barnes
// integrals, and an independent quadrature of the conditional error
// probability against the SNR distribution for cross-checking.
MetricResult ber_single_series(const SingleLinkChannel& ch,
                               const ModulationSpec& mod);
MetricResult ber_single_quadrature(const SingleLinkChannel& ch,
                                   const ModulationSpec& mod);

// Ergodic capacity E[log2(1 + SNR)] in bit/s/Hz: closed form (production),
// direct quadrature of the survival function (cross-check), and the
// log-moment lower bound log2 e * E[ln SNR] clamped at zero.
MetricResult capacity_single_exact(const SingleLinkChannel& ch);
MetricResult capacity_single_quadrature(const SingleLinkChannel& ch);
MetricResult capacity_single_bound(const SingleLinkChannel& ch);

}  // namespace thz
