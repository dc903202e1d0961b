// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate.  Each criterion prints exactly one PASS/FAIL
// line with the measured number and the pinned tolerance; the exit status
// is the number of failed criteria.  Tolerances live here, in code, on
// purpose: they are the contract.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "thz/channel.hpp"
#include "thz/config.hpp"
#include "thz/montecarlo.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"
#include "thz/special/gauss_legendre.hpp"
#include "thz/sweep.hpp"

using namespace thz;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %s (%s)\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

PointingGeometry point_at(double phi) {
  return derive_pointing(pointing_for_targets(0.1, 0.054, phi));
}

const FtrParams kRef{2.0, 10.0, 0.5};  // m, K, delta

// ---------------------------------------------------------------------
// Criterion: the analytical SNR density is a probability density.
void density_normalization() {
  const double tol = 1e-3;
  double worst = 0.0;
  for (double phi : {1.0, 2.5, 6.0}) {
    const SingleLinkChannel ch(kRef, point_at(phi), db_to_linear(20.0));
    const double sq = std::sqrt(ch.xi());
    double norm = 0.0;
    double lo = 0.0;
    for (double hi = sq / 8.0; lo < 64.0 * sq; lo = hi, hi *= 2.0) {
      norm += sf::panel_integrate(
          [&](double v) { return 2.0 * v * snr_pdf(ch, v * v); }, lo, hi, 1,
          32, 0.0);
    }
    worst = std::max(worst, std::fabs(norm - 1.0));
  }
  report("snr density integrates to one across jitter regimes", worst <= tol,
         fmt("max |integral - 1| = %.2e, tolerance %.0e", worst, tol));
}

// ---------------------------------------------------------------------
// Criterion: a million simulated SNR draws follow the analytical law.
// The supremum distance is upper-bounded by evaluating the exact
// distribution at every 20th order statistic, which inflates the bound by
// at most stride/n = 2e-5.
void sampler_distribution_distance() {
  const double tol = 0.005;
  const long long n = 1000000;
  const SingleLinkChannel ch(kRef, point_at(2.5), db_to_linear(20.0));
  mc::RandomStream rs(12345, 0);
  std::vector<double> x(static_cast<size_t>(n));
  for (auto& v : x) v = mc::sample_snr(rs, ch);
  std::sort(x.begin(), x.end());
  const size_t stride = 20;
  double ks = 0.0;
  size_t a = 0;
  double fa = snr_cdf(ch, x[0]);
  ks = std::max(ks, fa);  // below the smallest sample
  while (a + 1 < x.size()) {
    const size_t b = std::min(a + stride, x.size() - 1);
    const double fb = snr_cdf(ch, x[b]);
    // On [x_a, x_b] the empirical cdf ranges over [a/n, (b+1)/n] and the
    // exact cdf over [fa, fb]; both are monotone.
    ks = std::max(ks, static_cast<double>(b + 1) / n - fa);
    ks = std::max(ks, fb - static_cast<double>(a) / n);
    a = b;
    fa = fb;
  }
  ks = std::max(ks, 1.0 - fa);
  report("simulated snr draws match the distribution", ks <= tol,
         fmt("KS upper bound %.2e at 1e6 draws, tolerance %.0e", ks, tol));
}

// ---------------------------------------------------------------------
// Criterion: combined-receiver outage agrees with simulation within three
// standard errors wherever the probability is resolvable.
void outage_against_simulation() {
  const double thr = db_to_linear(4.0);
  bool pass = true;
  double worst = 0.0;
  for (int l : {2, 4}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    for (double db = 0.0; db <= 40.0; db += 5.0) {
      const MrcChannel ch(branches, point_at(2.5), db_to_linear(db));
      const double exact = outage_mrc(ch, thr).value;
      if (exact < 1e-4) continue;
      mc::SimConfig cfg;
      cfg.samples = 100000;
      cfg.seed = 1;
      const mc::EmpiricalMetric e = mc::estimate_outage_mrc(ch, thr, cfg);
      const double sigma = std::sqrt(std::max(e.variance, 1e-300));
      const double pulls = std::fabs(e.value - exact) / (sigma + 1e-12);
      worst = std::max(worst, pulls);
      if (std::fabs(e.value - exact) > 3.0 * sigma + 1e-6) pass = false;
    }
  }
  report("combined outage tracks simulation within three sigma", pass,
         fmt("worst deviation %.2f sigma over L in {2,4}, cap %.0f", worst,
             3.0));
}

// ---------------------------------------------------------------------
// Criterion: the one-branch combiner is the direct link.
void single_branch_reduction() {
  const double tol = 1e-3;
  double worst = 0.0;
  const PointingGeometry pt = point_at(2.5);
  const double thr = db_to_linear(4.0);
  for (int i = 0; i < 10; ++i) {
    const double g0 = db_to_linear(2.0 + 4.0 * i);
    const SingleLinkChannel s(kRef, pt, g0);
    const MrcChannel one({kRef}, pt, g0);
    const double a = outage_single(s, thr).value;
    const double b = outage_mrc(one, thr).value;
    worst = std::max(worst, std::fabs(a - b) / std::max(a, 1e-300));
  }
  report("one-branch combining reduces to the direct link", worst <= tol,
         fmt("max relative gap %.2e over 10 points, tolerance %.0e", worst,
             tol));
}

// ---------------------------------------------------------------------
// Criterion: high-SNR outage slopes equal the diversity order
// L*min(1, h) regardless of the fading shape parameters.
void diversity_slopes() {
  const double tol = 0.05;
  struct Pair {
    int l;
    double phi;
  };
  const Pair pairs[] = {{1, 1.0}, {2, 1.0}, {2, 2.5}, {4, 6.0}};
  bool pass = true;
  double worst = 0.0;
  for (const Pair& pr : pairs) {
    const PointingGeometry pt = point_at(pr.phi);
    const double order = pr.l * std::min(1.0, pt.h);
    for (double m : {2.0, 4.0}) {
      for (double delta : {0.1, 0.9}) {
        const FtrParams f{m, 10.0, delta};
        const std::vector<FtrParams> branches(static_cast<size_t>(pr.l), f);
        const MrcChannel lo(branches, pt, 1e7);
        const MrcChannel hi(branches, pt, 1e8);
        const double fl = outage_mrc(lo, 1.0).value;
        const double fh = outage_mrc(hi, 1.0).value;
        const double slope = -(std::log(fh) - std::log(fl)) / std::log(10.0);
        const double rel = std::fabs(slope - order) / order;
        worst = std::max(worst, rel);
        if (rel > tol) pass = false;
      }
    }
  }
  report("outage slopes match the diversity order", pass,
         fmt("max slope error %.2e across 16 shapes, tolerance %.0e", worst,
             tol));
}

// ---------------------------------------------------------------------
// Criterion: the two independent error-rate computations agree, and both
// agree with simulation.
void error_rate_consistency() {
  const double tol = 1e-2;
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  const PointingGeometry pt = point_at(2.5);
  double worst = 0.0;
  bool pass = true;
  for (int l : {1, 2}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    for (double db : {0.0, 10.0, 20.0, 30.0, 40.0}) {
      const MrcChannel ch(branches, pt, db_to_linear(db));
      const double a = ber_mrc(ch, bpsk).value;
      const double b = ber_mrc_quadrature(ch, bpsk).value;
      if (a < 1e-6 && b < 1e-6) continue;
      const double rel = std::fabs(a - b) / std::max(b, 1e-300);
      worst = std::max(worst, rel);
      if (rel > tol) pass = false;
    }
  }
  double worst_pulls = 0.0;
  for (int l : {1, 2}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    for (double db : {0.0, 10.0, 20.0}) {
      const MrcChannel ch(branches, pt, db_to_linear(db));
      mc::SimConfig cfg;
      cfg.samples = 200000;
      cfg.seed = 1;
      const mc::EmpiricalMetric e = mc::estimate_ber_mrc(ch, bpsk, cfg);
      const double exact = ber_mrc(ch, bpsk).value;
      const double sigma = std::sqrt(std::max(e.variance, 1e-300));
      const double pulls = std::fabs(e.value - exact) / (sigma + 1e-12);
      worst_pulls = std::max(worst_pulls, pulls);
      if (pulls > 3.0) pass = false;
    }
  }
  report("error-rate methods agree and match simulation", pass,
         fmt("max method gap %.2e (tol 1e-2), worst simulation pull %.2f sigma",
             worst, worst_pulls));
}

// ---------------------------------------------------------------------
// Criterion: the two capacity computations agree, simulation brackets
// them, the closed-form floor stays below the exact value at moderate and
// high SNR, and adding branches helps with diminishing returns.
void capacity_consistency() {
  const double tol = 1e-2;
  const PointingGeometry pt = point_at(2.5);
  double worst = 0.0;
  bool pass = true;
  for (int l : {1, 2}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    for (double db : {0.0, 10.0, 20.0, 30.0}) {
      const MrcChannel ch(branches, pt, db_to_linear(db));
      const double a = capacity_mrc(ch).value;
      const double b = capacity_mrc_quadrature(ch).value;
      const double rel = std::fabs(a - b) / std::max(b, 1e-300);
      worst = std::max(worst, rel);
      if (rel > tol) pass = false;
    }
  }
  double worst_pulls = 0.0;
  for (int l : {1, 2}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    for (double db : {10.0, 30.0}) {
      const MrcChannel ch(branches, pt, db_to_linear(db));
      mc::SimConfig cfg;
      cfg.samples = 200000;
      cfg.seed = 1;
      const mc::EmpiricalMetric e = mc::estimate_capacity_mrc(ch, cfg);
      const double exact = capacity_mrc(ch).value;
      const double sigma = std::sqrt(std::max(e.variance, 1e-300));
      const double pulls = std::fabs(e.value - exact) / (sigma + 1e-12);
      worst_pulls = std::max(worst_pulls, pulls);
      if (pulls > 3.0) pass = false;
    }
  }
  for (double db : {10.0, 20.0, 30.0, 40.0}) {
    const SingleLinkChannel ch(kRef, pt, db_to_linear(db));
    if (capacity_single_bound(ch).value >
        capacity_single_exact(ch).value + 1e-9) {
      pass = false;
    }
  }
  const double g30 = db_to_linear(30.0);
  const double c1 = capacity_mrc(MrcChannel({kRef}, pt, g30)).value;
  const double c2 = capacity_mrc(MrcChannel({kRef, kRef}, pt, g30)).value;
  const double c4 =
      capacity_mrc(MrcChannel({kRef, kRef, kRef, kRef}, pt, g30)).value;
  const bool growing = c1 < c2 && c2 < c4;
  const bool concave = (c2 - c1) >= 0.5 * (c4 - c2) - 1e-6;
  if (!growing || !concave) pass = false;
  report("capacity methods agree, respect the floor, and grow concavely",
         pass,
         fmt("max method gap %.2e (tol 1e-2), worst simulation pull %.2f "
             "sigma",
             worst, worst_pulls));
}

// ---------------------------------------------------------------------
// Criterion: the high-SNR expansions land within ten percent of the exact
// values once the mean SNR is deep in the power-law regime.
void asymptotic_accuracy() {
  const PointingGeometry pt = point_at(2.5);
  const ModulationSpec bpsk = ModulationSpec::bpsk();
  double lo = 2.0, hi = 0.0;
  for (int l : {1, 2}) {
    const std::vector<FtrParams> branches(static_cast<size_t>(l), kRef);
    const MrcChannel ch(branches, pt, 1e8);
    const double ro =
        outage_mrc_asymptotic(ch, 1.0).value / outage_mrc(ch, 1.0).value;
    const double rb =
        ber_mrc_asymptotic(ch, bpsk).value / ber_mrc(ch, bpsk).value;
    lo = std::min({lo, ro, rb});
    hi = std::max({hi, ro, rb});
  }
  const bool pass = lo >= 0.9 && hi <= 1.1;
  report("high-snr expansions stay within ten percent", pass,
         fmt("ratio range [%.3f, %.3f] inside [0.9, 1.1]", lo, hi));
}

// ---------------------------------------------------------------------
// Criterion: identical inputs produce byte-identical output.
void determinism() {
  cfg::Config c = cfg::Config::from_string(
      "link.gamma0_db = 20\n"
      "ftr.m = 2\nftr.k = 10\nftr.delta = 0.5\n"
      "pointing.r1_m = 0.1\npointing.s0 = 0.054\npointing.phi = 2.5\n"
      "mrc.l = 2\nsim.samples = 20000\nsim.seed = 1\n"
      "sweep.values = 10, 20\nsweep.mode = exact, mc\n");
  const SweepSpec spec = sweep_from(c);
  std::ostringstream a, b;
  run_sweep(c, spec, a);
  run_sweep(c, spec, b);
  const SingleLinkChannel ch(kRef, point_at(2.5), db_to_linear(20.0));
  mc::SimConfig sim;
  sim.samples = 50000;
  sim.seed = 7;
  const mc::EmpiricalMetric e1 = mc::estimate_outage(ch, 1.0, sim);
  const mc::EmpiricalMetric e2 = mc::estimate_outage(ch, 1.0, sim);
  const bool pass = a.str() == b.str() && !a.str().empty() &&
                    e1.value == e2.value && e1.ci_low == e2.ci_low &&
                    e1.ci_high == e2.ci_high;
  report("repeated runs are byte identical", pass,
         fmt("sweep bytes %.0f, estimator reruns equal: %.0f",
             static_cast<double>(a.str().size()), pass ? 1.0 : 0.0));
}

}  // namespace

int main() {
  std::printf("acceptance checks\n-----------------\n");
  density_normalization();
  sampler_distribution_distance();
  outage_against_simulation();
  single_branch_reduction();
  diversity_slopes();
  error_rate_consistency();
  capacity_consistency();
  asymptotic_accuracy();
  determinism();
  std::printf("-----------------\n%d criteria failed\n", failures);
  return failures;
}
