// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace thz {

// Result of a numerically evaluated metric: the value plus the error estimate
// and convergence diagnostics needed to judge whether it can be trusted.
struct MetricResult {
  double value = 0.0;
  double error_abs = 0.0;   // combined truncation + refinement error estimate
  int series_terms = 0;       // series terms used (0 when not series-based)
  long long evaluations = 0;  // integrand / kernel evaluations
  int refinements = 0;        // adaptive refinement rounds taken
  bool converged = true;
  bool clamped = false;     // true when the raw value fell outside the codomain
  double raw_value = 0.0;   // value before clamping (equals value when !clamped)
  std::string note;         // human-readable diagnostics (flags, warnings)

  double relative_error() const {
    const double denom = value != 0.0 ? value : 1.0;
    return error_abs / (denom < 0 ? -denom : denom);
  }
};

inline MetricResult make_metric(double v) {
  MetricResult r;
  r.value = v;
  r.raw_value = v;
  return r;
}

// Clamp a probability-like value into [0,1], recording the raw value.
inline void clamp_unit_interval(MetricResult& r) {
  r.raw_value = r.value;
  if (r.value < 0.0) {
    r.value = 0.0;
    r.clamped = true;
  } else if (r.value > 1.0) {
    r.value = 1.0;
    r.clamped = true;
  }
}

}  // namespace thz
