// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace thz::sf {

// Upper incomplete gamma Gamma(s, x) for real s (including negative and
// integer-negative values) and x >= 0. For x = 0, s must be positive.
// Gamma(s, x) is positive for every x > 0, whatever the sign of s.
double upper_inc_gamma(double s, double x);

// ln Gamma(s, x) for x > 0 — same branches as upper_inc_gamma but assembled
// in log space so extreme magnitudes (x^s with s very negative and x tiny)
// never overflow.
double upper_inc_gamma_log(double s, double x);

// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a), a > 0.
double lower_reg_gamma(double a, double x);

// The whole ladder ln Gamma(j+1-h, x) for j = 0..jmax, x > 0, h > 0.
// Entries with j+1-h <= 1 are evaluated directly; the rest follow the stable
// all-positive upward recursion Gamma(s+1,x) = s Gamma(s,x) + x^s e^{-x}
// carried out in log space.
std::vector<double> upper_inc_gamma_log_ladder(double h, double x, int jmax);

}  // namespace thz::sf
