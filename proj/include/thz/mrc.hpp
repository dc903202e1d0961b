// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "thz/channel.hpp"
#include "thz/metric.hpp"
#include "thz/singlelink.hpp"
#include "thz/special/mellin_barnes.hpp"

namespace thz {

// Controls for the contour evaluator behind the combined-SNR distribution:
// trapezoid spacing along each vertical contour, the tail tolerance that
// sets the contour half-length, and whether to halve the spacing once more
// to turn the spacing into an error estimate.
struct MrcControl {
  double grid_step = 0.05;
  double tail_tol = 1e-9;
  int refine = 1;
};

// Maximal-ratio combining of up to four receive branches.  Branches share
// the pointing geometry and the reference SNR gamma0 but may have distinct
// fading parameters; the combined SNR is the sum of the per-branch SNRs.
class MrcChannel {
 public:
  MrcChannel(const std::vector<FtrParams>& branches,
             const PointingGeometry& pointing, double gamma0,
             const SeriesControl& series = {});

  int branch_count() const { return static_cast<int>(branches_.size()); }
  const SingleLinkChannel& branch(int i) const { return branches_[i]; }
  const PointingGeometry& pointing() const { return pointing_; }
  double gamma0() const { return gamma0_; }
  double h() const { return pointing_.h; }

  // Cheap copy rebased to another mean SNR (see SingleLinkChannel).
  MrcChannel with_gamma0(double gamma0) const;

 private:
  std::vector<SingleLinkChannel> branches_;
  PointingGeometry pointing_;
  double gamma0_;
};

// Density, distribution, and complementary distribution of the combined
// SNR, with the contour-discretization error estimate and node counts in
// the result.  The survival function is the complement of the distribution,
// so its absolute accuracy is limited by the distribution's; deep right
// tails of the survival function should not be read below ~1e-12.
MetricResult mrc_snr_pdf(const MrcChannel& ch, double x,
                         const MrcControl& control = {});
MetricResult mrc_snr_cdf(const MrcChannel& ch, double x,
                         const MrcControl& control = {});
MetricResult mrc_snr_survival(const MrcChannel& ch, double x,
                              const MrcControl& control = {});

// P(combined SNR < threshold); threshold is linear, not dB.
MetricResult outage_mrc(const MrcChannel& ch, double threshold,
                        const MrcControl& control = {});

// Leading-order small-argument expansion of the outage probability, from
// the dominant pole of each branch contour.  Meaningful at high SNR only.
MetricResult outage_mrc_asymptotic(const MrcChannel& ch, double threshold);

// Average BER for the modulation family of ModulationSpec: closed contour
// evaluation (production), an independent quadrature of the conditional
// error probability against the combined distribution (cross-check), and
// the high-SNR expansion.
MetricResult ber_mrc(const MrcChannel& ch, const ModulationSpec& mod,
                     const MrcControl& control = {});
MetricResult ber_mrc_quadrature(const MrcChannel& ch, const ModulationSpec& mod,
                                const MrcControl& control = {});
MetricResult ber_mrc_asymptotic(const MrcChannel& ch, const ModulationSpec& mod);

// Ergodic capacity E[log2(1 + SNR)] in bit/s/Hz.  The closed path augments
// the distribution contour with one extra variable for ln(1 + x) and damps
// the SNR integral at relative rate epsilon (limit epsilon -> 0); the value
// is reported at epsilon together with the shift observed at epsilon / 10.
// Non-positive epsilon selects an automatic rate (1e-6 up to two branches,
// 1e-5 above, where the deeper contour stack amplifies cancellation).
// The quadrature path integrates the survival function for cross-checking.
MetricResult capacity_mrc(const MrcChannel& ch, double epsilon = 0.0,
                          const MrcControl& control = {});
MetricResult capacity_mrc_quadrature(const MrcChannel& ch,
                                     const MrcControl& control = {});

// Slope of the outage probability versus mean SNR on a log-log scale at
// high SNR: branch count times min(1, phi^2 / 2).
double diversity_order(const MrcChannel& ch);

// One mixture component of the combined-SNR distribution at argument x, as
// a literal multivariate Mellin-Barnes spec (one contour per branch).
// Summing evaluations over index tuples reproduces mrc_snr_cdf; exposed so
// tests can cross-check the production evaluator against the generic
// engine, and as a worked example of assembling specs.
mb::FoxHSpec mrc_cdf_term_spec(const MrcChannel& ch,
                               const std::vector<int>& indices, double x);

}  // namespace thz
