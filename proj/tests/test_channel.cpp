// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "thz/channel.hpp"
#include "thz/special/gamma.hpp"

using namespace thz;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace

TEST_CASE("fading coefficients match frozen references") {
  // References frozen from 40-digit arithmetic in an independent
  // implementation of the confluent-hypergeometric coefficient sum.
  const FtrParams a{2.0, 10.0, 0.5};
  CHECK(rel_err(ftr_coefficient(a, 0), 9.244018457427e-03) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(a, 1), 1.443568708688e-03) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(a, 3), 1.073055225382e-04) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(a, 7), 7.379030921611e-06) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(a, 15), 8.108222559269e-06) <= 1e-11);

  const FtrParams b{2.0, 2.0, 0.9};
  CHECK(rel_err(ftr_coefficient(b, 0), 8.775744685828e-02) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(b, 1), 2.716629428607e-02) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(b, 3), 1.741841860572e-02) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(b, 7), 2.005083832333e-01) <= 1e-11);
  CHECK(rel_err(ftr_coefficient(b, 15), 8.969286051763e+03) <= 1e-11);
}

TEST_CASE("fading coefficients reduce to closed forms") {
  // Without a specular component the coefficients collapse to
  // Gamma(m+j) m^{-(m+j)}.
  for (int j : {0, 2, 5}) {
    const FtrParams p{3.0, 0.0, 0.0};
    const double want =
        std::exp(sf::ln_gamma_real(3.0 + j) - (3.0 + j) * std::log(3.0));
    CAPTURE(j);
    CHECK(rel_err(ftr_coefficient(p, j), want) <= 1e-12);
  }
  // With equal specular rays the sum telescopes to
  // Gamma(m+j) (m+K)^{-(m+j)}.
  for (int j : {0, 1, 4, 9}) {
    const FtrParams p{2.5, 4.0, 0.0};
    const double want =
        std::exp(sf::ln_gamma_real(2.5 + j) - (2.5 + j) * std::log(6.5));
    CAPTURE(j);
    CHECK(rel_err(ftr_coefficient(p, j), want) <= 1e-12);
  }
}

TEST_CASE("mixture weights sum to one") {
  for (auto pr : {FtrParams{2.0, 10.0, 0.5}, FtrParams{4.0, 2.0, 0.9},
                  FtrParams{1.5, 15.0, 0.1}}) {
    const auto w = ftr_weights(pr, 1e-10);
    double sum = 0.0;
    for (double lw : w.logw) sum += std::exp(lw);
    CAPTURE(pr.k);
    CHECK(rel_err(sum + w.tail_mass, 1.0) <= 1e-9);
    CHECK_FALSE(w.truncated);
  }
}

TEST_CASE("power density normalizes with unit mean") {
  const FtrParams p{2.0, 10.0, 0.5};
  const auto w = ftr_weights(p, 1e-12);
  double norm = 0.0, mean = 0.0;
  const double dx = 1e-3;
  for (double x = 0.5 * dx; x < 60.0; x += dx) {
    const double f = ftr_power_pdf(p, w, x);
    norm += f * dx;
    mean += x * f * dx;
  }
  CHECK(rel_err(norm, 1.0) <= 1e-6);
  CHECK(rel_err(mean, 1.0) <= 1e-5);

  double cum = 0.0;
  for (double x = 0.5 * dx; x < 2.0; x += dx) {
    cum += ftr_power_pdf(p, w, x) * dx;
  }
  CHECK(rel_err(ftr_power_cdf(p, w, 2.0), cum) <= 1e-5);
}

TEST_CASE("path gain follows the link budget") {
  const LinkBudget l{275e9, 50.0, 50.0, 50.0, 0.0};
  CHECK(rel_err(path_gain(l), 0.1735034603) <= 1e-6);
  LinkBudget labs = l;
  labs.absorption_per_m = 0.01;
  CHECK(rel_err(path_gain(labs), 0.1735034603 * std::exp(-0.25)) <= 1e-6);
}

TEST_CASE("pointing geometry round trip and displacement moment") {
  for (double phi : {1.0, 2.5, 6.0}) {
    const PointingParams p = pointing_for_targets(0.1, 0.054, phi);
    const PointingGeometry g = derive_pointing(p);
    CAPTURE(phi);
    CHECK(rel_err(g.s0, 0.054) <= 1e-12);
    CHECK(rel_err(g.phi, phi) <= 1e-12);
    // E[hp^2] = s0^2 phi^2 / (phi^2 + 2)
    double m2 = 0.0;
    const double dh = g.s0 / 400000.0;
    for (double hp = 0.5 * dh; hp < g.s0; hp += dh) {
      m2 += hp * hp * pointing_pdf(g, hp) * dh;
    }
    CHECK(rel_err(m2, g.s0 * g.s0 * phi * phi / (phi * phi + 2.0)) <= 1e-6);
  }
}
