#pragma once

namespace metaweave::stats {

/// Inverse standard normal CDF. Acklam's rational approximation with one
/// Halley refinement step; absolute error below 1e-13 on (0, 1).
double normal_quantile(double p);

/// Student-t quantile for df > 0, computed through the inverse regularized
/// incomplete beta function.
double t_quantile(double p, double df);

/// log Gamma(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b) via continued fraction.
double incomplete_beta(double a, double b, double x);

/// Inverse of incomplete_beta in x for fixed (a, b).
double incomplete_beta_inv(double a, double b, double p);

} // namespace metaweave::stats
