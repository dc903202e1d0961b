// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thz/channel.hpp"
#include "thz/singlelink.hpp"
#include "thz/special/gauss_legendre.hpp"

using namespace thz;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

SingleLinkChannel make(double k, double m, double delta, double phi,
                       double gamma0_db) {
  FtrParams f;
  f.m = m;
  f.k = k;
  f.delta = delta;
  const PointingGeometry g =
      derive_pointing(pointing_for_targets(0.1, 0.054, phi));
  return SingleLinkChannel(f, g, db_to_linear(gamma0_db));
}

}  // namespace

TEST_CASE("snr density integrates to its distribution") {
  struct Cfg {
    double k, m, delta, phi;
  };
  const std::vector<Cfg> cfgs = {
      {10.0, 2.0, 0.5, 2.5}, {2.0, 2.0, 0.9, 1.0}, {5.0, 0.7, 0.3, 6.0}};
  for (const Cfg& c : cfgs) {
    CAPTURE(c.k);
    CAPTURE(c.phi);
    const SingleLinkChannel ch = make(c.k, c.m, c.delta, c.phi, 17.0);
    const double xi = ch.xi();
    // Integrate in v with x = v^2 so the density's x^{h-1} endpoint power
    // becomes a smooth v^{2h-1}.
    const double sq = std::sqrt(xi);
    double norm = 0.0, mean = 0.0, cdf_at = 0.0;
    const double probe = 4.0 * xi;
    double lo = 0.0;
    for (double hi = sq / 8.0; lo < 64.0 * sq; lo = hi, hi *= 2.0) {
      norm += sf::panel_integrate(
          [&](double v) { return 2.0 * v * snr_pdf(ch, v * v); }, lo, hi, 1, 32,
          0.0);
      mean += sf::panel_integrate(
          [&](double v) { return 2.0 * v * v * v * snr_pdf(ch, v * v); }, lo,
          hi, 1, 32, 0.0);
      if (hi * hi <= probe * 1.0000001) {
        cdf_at += sf::panel_integrate(
            [&](double v) { return 2.0 * v * snr_pdf(ch, v * v); }, lo, hi, 1,
            32, 0.0);
      }
    }
    CHECK(rel_err(norm, 1.0) <= 2e-8);
    // E[snr] = gamma0 * s0^2 phi^2 / (phi^2 + 2)
    const double s0 = ch.pointing().s0;
    const double p2 = c.phi * c.phi;
    CHECK(rel_err(mean, ch.gamma0() * s0 * s0 * p2 / (p2 + 2.0)) <= 1e-7);
    CHECK(rel_err(cdf_at, snr_cdf(ch, probe)) <= 2e-8);
    for (double a : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(a);
      CHECK(rel_err(snr_cdf(ch, a * xi) + snr_survival(ch, a * xi), 1.0) <=
            2e-9);
    }
    const double x0 = 1.3 * xi, dx = 1e-5 * xi;
    CHECK(rel_err(snr_pdf(ch, x0),
                  (snr_cdf(ch, x0 + dx) - snr_cdf(ch, x0 - dx)) / (2.0 * dx)) <=
          1e-7);
  }
}

TEST_CASE("snr distribution matches frozen references") {
  // Frozen from 40-digit arithmetic in an independent implementation.
  const SingleLinkChannel c0 = make(10, 2, 0.5, 1.0, 20);
  CHECK(rel_err(snr_cdf(c0, c0.xi()), 0.4068835960664) <= 1e-8);
  const SingleLinkChannel c1 = make(10, 2, 0.5, 2.5, 20);
  CHECK(rel_err(snr_cdf(c1, c1.xi()), 0.07294947653921) <= 1e-8);
  const SingleLinkChannel c2 = make(10, 2, 0.5, 6.0, 20);
  CHECK(rel_err(snr_cdf(c2, c2.xi()), 0.04891913835546) <= 1e-8);
}

TEST_CASE("outage equals the distribution at the threshold") {
  const SingleLinkChannel ch = make(10, 2, 0.5, 2.5, 20);
  const MetricResult r = outage_single(ch, ch.xi());
  CHECK(rel_err(r.value, snr_cdf(ch, ch.xi())) <= 1e-14);
  CHECK(r.converged);
}

TEST_CASE("error rate series agrees with direct integration") {
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  for (double db : {10.0, 20.0, 30.0}) {
    const SingleLinkChannel ch = make(10, 2, 0.5, 2.5, db);
    const MetricResult a = ber_single_series(ch, bpsk);
    const MetricResult b = ber_single_quadrature(ch, bpsk);
    CAPTURE(db);
    CHECK(rel_err(a.value, b.value) <= 3e-7);
  }
  const SingleLinkChannel ch = make(2, 2, 0.9, 1.0, 20.0);
  CHECK(rel_err(ber_single_series(ch, bpsk).value,
                ber_single_quadrature(ch, bpsk).value) <= 3e-7);
}

TEST_CASE("error rate matches frozen references") {
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  const SingleLinkChannel f25 = make(10, 2, 0.5, 2.5, 20.0);
  CHECK(rel_err(ber_single_series(f25, bpsk).value, 0.281658612878) <= 1e-8);
  const SingleLinkChannel f10 = make(10, 2, 0.5, 1.0, 20.0);
  CHECK(rel_err(ber_single_series(f10, bpsk).value, 0.369005562246) <= 1e-8);
  const SingleLinkChannel lo = make(2, 2, 0.9, 1.0, -60.0);
  CHECK(rel_err(ber_single_series(lo, bpsk).value, 0.5) <= 2e-3);
}

TEST_CASE("error rate survives severe term cancellation") {
  // Narrow jitter relative to the beam makes the series terms alternate
  // with huge amplification; the result must still match both the direct
  // integral and a frozen 40-digit reference.
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  const SingleLinkChannel ch = make(10, 2, 0.5, 6.0, 20.0);
  const MetricResult a = ber_single_series(ch, bpsk);
  const MetricResult b = ber_single_quadrature(ch, bpsk);
  CHECK(rel_err(a.value, 0.2581274265728063) <= 5e-5);
  CHECK(rel_err(b.value, 0.2581274265728063) <= 1e-6);
  CHECK(std::fabs(a.value - 0.2581274265728063) <= 5.0 * a.error_abs + 1e-12);
}

TEST_CASE("capacity series agrees with direct integration") {
  for (double db : {0.0, 10.0, 20.0, 30.0}) {
    const SingleLinkChannel ch = make(10, 2, 0.5, 2.5, db);
    CAPTURE(db);
    CHECK(rel_err(capacity_single_exact(ch).value,
                  capacity_single_quadrature(ch).value) <= 2e-7);
  }
  const SingleLinkChannel ch = make(2, 2, 0.9, 1.0, 20.0);
  CHECK(rel_err(capacity_single_exact(ch).value,
                capacity_single_quadrature(ch).value) <= 2e-7);
}

TEST_CASE("capacity matches frozen references and respects its bound") {
  const SingleLinkChannel c20 = make(10, 2, 0.5, 2.5, 20);
  const SingleLinkChannel c30 = make(10, 2, 0.5, 2.5, 30);
  CHECK(rel_err(capacity_single_exact(c20).value, 0.270747178663) <= 5e-7);
  CHECK(rel_err(capacity_single_exact(c30).value, 1.45047400997) <= 5e-7);
  CHECK(rel_err(capacity_single_bound(c30).value, 0.4861667265909) <= 5e-8);
  for (double db : {10.0, 20.0, 30.0, 40.0}) {
    const SingleLinkChannel ch = make(10, 2, 0.5, 2.5, db);
    CAPTURE(db);
    CHECK(capacity_single_bound(ch).value <=
          capacity_single_exact(ch).value + 1e-12);
  }
  const SingleLinkChannel c0 = make(10, 2, 0.5, 2.5, 0.0);
  CHECK(capacity_single_bound(c0).clamped);
}

TEST_CASE("survival decays monotonically into the deep tail") {
  const SingleLinkChannel ch = make(10, 2, 0.5, 2.5, 17.0);
  double prev = 1.0;
  for (double a = 1.0; a <= 200.0; a *= 1.6) {
    const double s = snr_survival(ch, a * ch.xi());
    CAPTURE(a);
    CHECK(std::isfinite(s));
    CHECK(s >= 0.0);
    CHECK(s <= prev + 1e-15);
    prev = s;
  }
}
