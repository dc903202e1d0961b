// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <string>

#include "doctest.h"
#include "thz/channel.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"
#include "thz/special/mellin_barnes.hpp"

using namespace thz;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

// Deep-tail values shrink toward the noise floor of the contour
// quadrature, where only absolute agreement is meaningful; accept either
// measure, as the smaller of the two errors.
bool agree(double got, double want, double tol) {
  return std::fabs(got - want) <= tol || rel_err(got, want) <= tol;
}

const FtrParams kFtr{2.0, 10.0, 0.5};
const FtrParams kFtr2{2.0, 2.0, 0.9};
constexpr double kG0 = 1000.0;  // 30 dB mean branch SNR

PointingGeometry point_at(double phi) {
  return derive_pointing(pointing_for_targets(0.1, 0.054, phi));
}

}  // namespace

TEST_CASE("single branch combining reduces to the direct link") {
  for (double phi : {1.0, 2.5, 6.0}) {
    CAPTURE(phi);
    const PointingGeometry pt = point_at(phi);
    const SingleLinkChannel single(kFtr, pt, kG0);
    const MrcChannel one({kFtr}, pt, kG0);
    for (double x : {0.05, 0.3, 1.0, 5.0, 25.0, 120.0, 600.0}) {
      CAPTURE(x);
      CHECK(agree(mrc_snr_cdf(one, x).value, snr_cdf(single, x), 2e-9));
      CHECK(agree(mrc_snr_pdf(one, x).value, snr_pdf(single, x), 2e-9));
    }
    CHECK(rel_err(outage_mrc(one, 10.0).value,
                  outage_single(single, 10.0).value) <= 2e-9);
    // The one-variable series path carries more cancellation at large h;
    // compare within its honestly reported precision.
    CHECK(rel_err(ber_mrc(one, ModulationSpec::bpsk()).value,
                  ber_single_series(single, ModulationSpec::bpsk()).value) <=
          (phi > 5.0 ? 1e-7 : 1e-8));
    CHECK(rel_err(ber_mrc_quadrature(one, ModulationSpec::bpsk()).value,
                  ber_single_series(single, ModulationSpec::bpsk()).value) <=
          1e-7);
    CHECK(rel_err(capacity_mrc(one).value,
                  capacity_single_exact(single).value) <= 5e-5);
    CHECK(rel_err(capacity_mrc_quadrature(one).value,
                  capacity_single_quadrature(single).value) <= 1e-6);
  }
  const MrcChannel one({kFtr}, point_at(6.0), kG0);
  CHECK(rel_err(ber_mrc(one, ModulationSpec::bpsk()).value,
                5.444175738898112e-02) <= 1e-9);
}

TEST_CASE("combined distribution matches the literal contour enumeration") {
  // Evaluate the truncated two-branch mixture by brute-force enumeration
  // of every term through the general multivariate contour engine and
  // compare with the production evaluator.
  SeriesControl trunc;
  trunc.j_max = 6;
  trunc.weight_tol = 1e-30;
  const MrcChannel two({kFtr, kFtr}, point_at(2.5), kG0, trunc);
  for (double x : {0.5, 4.0}) {
    double literal = 0.0;
    for (int j0 = 0; j0 < 7; ++j0) {
      for (int j1 = 0; j1 < 7; ++j1) {
        const mb::FoxHSpec spec = mrc_cdf_term_spec(two, {j0, j1}, x);
        literal += mb::fox_h_multivariate(spec).value;
      }
    }
    CAPTURE(x);
    CHECK(rel_err(mrc_snr_cdf(two, x).value, literal) <= 2e-7);
  }
}

TEST_CASE("combined error rate and capacity agree across methods") {
  const PointingGeometry pt = point_at(2.5);
  const MrcChannel two({kFtr, kFtr}, pt, kG0);
  const MrcChannel het({kFtr, kFtr2}, pt, kG0);
  const MrcChannel four({kFtr, kFtr, kFtr, kFtr}, pt, kG0);
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  CHECK(rel_err(ber_mrc(two, bpsk).value, ber_mrc_quadrature(two, bpsk).value) <=
        1e-7);
  CHECK(rel_err(ber_mrc(het, bpsk).value, ber_mrc_quadrature(het, bpsk).value) <=
        1e-7);
  CHECK(rel_err(capacity_mrc(two).value, capacity_mrc_quadrature(two).value) <=
        2e-4);
  CHECK(rel_err(capacity_mrc(het).value, capacity_mrc_quadrature(het).value) <=
        2e-4);
  CHECK(rel_err(ber_mrc(four, bpsk).value,
                ber_mrc_quadrature(four, bpsk).value) <= 1e-6);
  CHECK(rel_err(capacity_mrc(four).value,
                capacity_mrc_quadrature(four).value) <= 5e-4);
}

TEST_CASE("outage follows the predicted diversity order") {
  const PointingGeometry pt = point_at(2.5);
  const MrcChannel two({kFtr, kFtr}, pt, 1.0);
  const double thr = 1.0;
  const MrcChannel hi1 = two.with_gamma0(1e7);
  const MrcChannel hi2 = two.with_gamma0(1e8);
  const double f1 = outage_mrc(hi1, thr).value;
  const double f2 = outage_mrc(hi2, thr).value;
  const double slope = -(std::log(f2) - std::log(f1)) / std::log(10.0);
  CHECK(std::fabs(slope - diversity_order(two)) <= 0.02 * diversity_order(two));
  CHECK(rel_err(outage_mrc_asymptotic(hi2, thr).value / f2, 1.0) <= 0.05);
  const MrcChannel one = MrcChannel({kFtr}, pt, 1.0).with_gamma0(1e8);
  CHECK(rel_err(outage_mrc_asymptotic(one, thr).value /
                    outage_mrc(one, thr).value,
                1.0) <= 0.02);
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  CHECK(rel_err(ber_mrc_asymptotic(hi2, bpsk).value / ber_mrc(hi2, bpsk).value,
                1.0) <= 0.05);
  // Severe jitter caps the per-branch exponent at h < 1: the combined
  // slope is L*h instead of L.
  const MrcChannel twop1({kFtr, kFtr}, point_at(1.0), 1.0);
  CHECK(diversity_order(twop1) == doctest::Approx(1.0).epsilon(1e-12));
  const MrcChannel hp1 = twop1.with_gamma0(1e8);
  const MrcChannel hp2 = twop1.with_gamma0(1e9);
  const double s2 = -(std::log(outage_mrc(hp2, thr).value) -
                      std::log(outage_mrc(hp1, thr).value)) /
                    std::log(10.0);
  CHECK(std::fabs(s2 - 1.0) <= 0.02);
}

TEST_CASE("combined distribution keeps its shape invariants") {
  const PointingGeometry pt = point_at(2.5);
  const MrcChannel one({kFtr}, pt, kG0);
  const MrcChannel two({kFtr, kFtr}, pt, kG0);
  const MrcChannel four({kFtr, kFtr, kFtr, kFtr}, pt, kG0);
  const double x = 50.0;
  const double F1 = mrc_snr_cdf(one, x).value;
  const double F2 = mrc_snr_cdf(two, x).value;
  const double F4 = mrc_snr_cdf(four, x).value;
  CHECK(F4 < F2);
  CHECK(F2 < F1);
  CHECK(rel_err(mrc_snr_cdf(two, 1e9).value, 1.0) <= 1e-6);
  const double dx = 1e-3;
  const double fd =
      (mrc_snr_cdf(two, x + dx).value - mrc_snr_cdf(two, x - dx).value) /
      (2.0 * dx);
  CHECK(agree(mrc_snr_pdf(two, x).value, fd, 1e-5));
  CHECK(rel_err(mrc_snr_survival(two, x).value + mrc_snr_cdf(two, x).value,
                1.0) <= 1e-12);
  const MetricResult o = outage_mrc(two, 10.0);
  CHECK(o.converged);
  CHECK(o.error_abs < 1e-7);
  const MetricResult c = capacity_mrc(two);
  CHECK(c.converged);
  CHECK(c.note.find("eps") != std::string::npos);
}
