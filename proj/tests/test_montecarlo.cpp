// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "thz/channel.hpp"
#include "thz/montecarlo.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"

using namespace thz;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

const FtrParams kFtr{2.0, 10.0, 0.5};

}  // namespace

TEST_CASE("counter cipher reproduces the published test vector") {
  // Zero key, zero counter block for the 4x32 counter cipher with 10
  // rounds, from the reference implementation's known-answer tests.
  mc::Philox ph(0, 0);
  const auto b = ph.next_block();
  CHECK(b[0] == 0x6627e8d5u);
  CHECK(b[1] == 0xe169c58du);
  CHECK(b[2] == 0xbc57ac4cu);
  CHECK(b[3] == 0x9b00dbd8u);
}

TEST_CASE("random streams are deterministic and separated") {
  mc::RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool same = true, diff_stream = false, diff_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next_uniform();
    same = same && x == b.next_uniform();
    diff_stream = diff_stream || x != c.next_uniform();
    diff_seed = diff_seed || x != d.next_uniform();
  }
  CHECK(same);
  CHECK(diff_stream);
  CHECK(diff_seed);
}

TEST_CASE("scalar samplers have the right moments") {
  const int n = 200000;
  mc::RandomStream rs(7, 0);
  double su = 0, su2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rs.next_uniform();
    su += u;
    su2 += u * u;
  }
  CHECK(std::fabs(su / n - 0.5) <= 3e-3);
  CHECK(rel_err(su2 / n - (su / n) * (su / n), 1.0 / 12.0) <= 5e-3);
  double sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rs.next_normal();
    sn += x;
    sn2 += x * x;
  }
  CHECK(std::fabs(sn / n) <= 6e-3);
  CHECK(rel_err(sn2 / n, 1.0) <= 8e-3);
  for (double shape : {0.4, 1.0, 2.0, 7.5}) {
    double sg = 0, sg2 = 0;
    for (int i = 0; i < n; ++i) {
      const double g = rs.next_gamma(shape);
      sg += g;
      sg2 += g * g;
    }
    CAPTURE(shape);
    CHECK(rel_err(sg / n, shape) <= 2e-2);
    CHECK(rel_err(sg2 / n - (sg / n) * (sg / n), shape) <= 4e-2);
  }
}

TEST_CASE("physical samplers match the closed-form laws") {
  const PointingGeometry pt =
      derive_pointing(pointing_for_targets(0.1, 0.054, 2.5));
  const int n = 400000;
  mc::RandomStream rs(11, 0);
  double sp = 0;
  int below1 = 0, below02 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = mc::sample_ftr_power(rs, kFtr);
    sp += g;
    if (g < 1.0) ++below1;
    if (g < 0.2) ++below02;
  }
  CHECK(rel_err(sp / n, 1.0) <= 5e-3);
  const FtrWeights fw = ftr_weights(kFtr);
  CHECK(std::fabs(static_cast<double>(below1) / n -
                  ftr_power_cdf(kFtr, fw, 1.0)) <= 5e-3);
  CHECK(std::fabs(static_cast<double>(below02) / n -
                  ftr_power_cdf(kFtr, fw, 0.2)) <= 5e-3);
  double sq = 0;
  for (int i = 0; i < n; ++i) {
    const double g = mc::sample_pointing_gain(rs, pt);
    sq += g * g;
  }
  // E[(gain)^2] = s0^2 h/(h+1)
  CHECK(rel_err(sq / n, pt.s0 * pt.s0 * pt.h / (pt.h + 1.0)) <= 5e-3);
}

TEST_CASE("empirical estimates bracket the analytical metrics") {
  const PointingGeometry pt =
      derive_pointing(pointing_for_targets(0.1, 0.054, 2.5));
  const SingleLinkChannel ch(kFtr, pt, 1000.0);
  mc::SimConfig cfg;
  cfg.samples = 400000;
  cfg.seed = 2026;
  const mc::EmpiricalMetric o = mc::estimate_outage(ch, 10.0, cfg);
  const double oa = outage_single(ch, 10.0).value;
  CHECK(o.ci_low <= oa);
  CHECK(oa <= o.ci_high);
  CHECK(rel_err(o.value, oa) <= 5e-3);
  const mc::EmpiricalMetric b = mc::estimate_ber(ch, ModulationSpec::bpsk(), cfg);
  const double ba = ber_single_series(ch, ModulationSpec::bpsk()).value;
  CHECK(b.ci_low <= ba);
  CHECK(ba <= b.ci_high);
  const mc::EmpiricalMetric c = mc::estimate_capacity(ch, cfg);
  const double ca = capacity_single_exact(ch).value;
  CHECK(c.ci_low <= ca);
  CHECK(ca <= c.ci_high);
  const mc::EmpiricalMetric o2 = mc::estimate_outage(ch, 10.0, cfg);
  CHECK(o.value == o2.value);
}

TEST_CASE("combined-receiver estimates bracket the analytical metrics") {
  const PointingGeometry pt =
      derive_pointing(pointing_for_targets(0.1, 0.054, 2.5));
  const MrcChannel two({kFtr, kFtr}, pt, 1000.0);
  mc::SimConfig cfg;
  cfg.samples = 400000;
  cfg.seed = 99;
  const mc::EmpiricalMetric o = mc::estimate_outage_mrc(two, 10.0, cfg);
  const double oa = outage_mrc(two, 10.0).value;
  CHECK(o.ci_low <= oa);
  CHECK(oa <= o.ci_high);
  const mc::EmpiricalMetric b =
      mc::estimate_ber_mrc(two, ModulationSpec::bpsk(), cfg);
  const double ba = ber_mrc(two, ModulationSpec::bpsk()).value;
  CHECK(b.ci_low <= ba);
  CHECK(ba <= b.ci_high);
  const mc::EmpiricalMetric c = mc::estimate_capacity_mrc(two, cfg);
  const double ca = capacity_mrc(two).value;
  CHECK(c.ci_low <= ca);
  CHECK(ca <= c.ci_high);
  const MrcChannel four({kFtr, kFtr, kFtr, kFtr}, pt, 1000.0);
  const mc::EmpiricalMetric o4 = mc::estimate_outage_mrc(four, 10.0, cfg);
  const double oa4 = outage_mrc(four, 10.0).value;
  CHECK(o4.ci_low <= oa4);
  CHECK(oa4 <= o4.ci_high);
}
