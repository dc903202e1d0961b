// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace thz::sf {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
// Computed by Newton iteration on the Legendre polynomial and cached
// per order, so repeated lookups are cheap.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int n);

// Accumulate f over [a, b] split into `panels` equal panels with an
// n-point rule on each.  f is any callable double -> T where T supports
// += and scalar *.
template <typename T, typename F>
T panel_integrate(F&& f, double a, double b, int panels, int n, T zero) {
  const GaussLegendreRule& rule = gauss_legendre(n);
  const double width = (b - a) / panels;
  T acc = zero;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      T v = f(mid + half * rule.nodes[k]);
      v *= half * rule.weights[k];
      acc += v;
    }
  }
  return acc;
}

}  // namespace thz::sf
