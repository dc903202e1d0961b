// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace thz::sf {

// Principal-branch log-gamma for complex arguments, Lanczos approximation
// (g = 7, 15 coefficients). For Re z < 0.5 the reflection formula is applied;
// there the imaginary part is correct modulo 2*pi (exp(ln_gamma(z)) always
// equals Gamma(z)), which is the property Mellin-Barnes integrands rely on.
// z must not be a non-positive integer.
std::complex<double> ln_gamma(std::complex<double> z);

// ln Gamma(1+d) for |d| <= 0.5 via the zeta series. Unlike std::lgamma this
// keeps full *relative* accuracy near the zero at d = 0, which matters when
// the result is later divided by d.
double ln_gamma1p(double d);

// Digamma psi(x) for x > 0.
double digamma(double x);

// Real log-gamma of a positive argument (thin wrapper, kept for symmetry).
double ln_gamma_real(double x);

}  // namespace thz::sf
