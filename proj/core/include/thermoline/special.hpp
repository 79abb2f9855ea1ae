#pragma once

// Modified Bessel function of the first kind, order zero. Needed for the
// normalization constant of the smoothed prior family, which involves
// exp(a/2) I0(a/2) - 1. The identity behind it:
//   integral_0^1 exp(a sin^2(pi u)) du = exp(a/2) I0(a/2).

namespace thermoline::special {

// I0(z). Power series for |z| <= 80, asymptotic expansion beyond.
// Relative accuracy is a few ulps across the real line; overflows for
// z > ~713 like exp(z) does.
double bessel_i0(double z);

// exp(-|z|) I0(z). Finite for all z, monotonically decaying like
// 1/sqrt(2 pi |z|); use this when z may be large.
double bessel_i0_scaled(double z);

// I0(z) - 1 without cancellation near z = 0 (the series starts at z^2/4).
double bessel_i0m1(double z);

// exp(a/2) I0(a/2) - 1, the core of the smoothed-prior normalization,
// evaluated without cancellation for small |a| and without overflow for
// very negative a. Requires a <= ~1400 to stay finite.
double smoothing_norm_core(double a);

}  // namespace thermoline::special
