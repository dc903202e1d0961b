// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace thz::sf {

// Streaming logsumexp: accumulates terms given as logarithms and returns
// log(sum(exp(v))) without overflowing, tracking a running peak so that the
// largest term is always represented at full precision.
struct LogSum {
  double peak = -INFINITY;
  double scaled = 0.0;

  void add(double v) {
    if (v == -INFINITY) return;
    if (v <= peak) {
      scaled += std::exp(v - peak);
    } else {
      scaled = scaled * std::exp(peak - v) + 1.0;
      peak = v;
    }
  }

  double log_total() const {
    return scaled > 0.0 ? peak + std::log(scaled) : -INFINITY;
  }

  double total() const { return scaled > 0.0 ? std::exp(log_total()) : 0.0; }
};

}  // namespace thz::sf
