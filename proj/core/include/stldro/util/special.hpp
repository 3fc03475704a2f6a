#pragma once

namespace stldro::util {

// Standard normal density and cumulative distribution.
double normal_pdf(double x);
double normal_cdf(double x);

// Quantile of the standard normal, p in (0,1). Rational initial guess
// (Acklam) refined with two Halley steps against normal_cdf; absolute
// error below 1e-14 over (1e-300, 1-1e-16).
double normal_quantile(double p);

// Inverse error function, y in (-1,1).
double erf_inv(double y);

}  // namespace stldro::util
