#include "metaweave/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace metaweave::stats {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");

    // Acklam coefficients
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    const double p_high = 1.0 - p_low;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF (erfc) tightens the
    // approximation to near machine precision.
    double e = 0.5 * std::erfc(-x / kSqrt2) - p;
    double u = e * kSqrt2Pi * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

double log_gamma(double x) {
    if (x <= 0.0)
        throw std::domain_error("log_gamma: x must be positive");
    // Lanczos, g = 7, n = 9
    static const double g[] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                               771.32342877765313,   -176.61502916214059, 12.507343278686905,
                               -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double acc = g[0];
    for (int i = 1; i < 9; ++i) acc += g[i] / (x + i);
    double t = x + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(acc);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double incomplete_beta_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;

    // bisection bracket plus Newton; derivative is the beta density
    double lo = 0.0, hi = 1.0;
    double x = 0.5;
    double ln_beta = log_gamma(a) + log_gamma(b) - log_gamma(a + b);
    for (int it = 0; it < 200; ++it) {
        double f = incomplete_beta(a, b, x) - p;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        double dens = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log(1.0 - x) - ln_beta);
        double step = (dens > 0.0) ? f / dens : 0.0;
        double x_new = x - step;
        if (!(x_new > lo && x_new < hi)) x_new = 0.5 * (lo + hi);
        if (std::fabs(x_new - x) < 1e-15 * (1.0 + std::fabs(x))) {
            x = x_new;
            break;
        }
        x = x_new;
    }
    return x;
}

double t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("t_quantile: p must lie in (0, 1)");
    if (!(df > 0.0))
        throw std::domain_error("t_quantile: df must be positive");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(1.0 - p, df);

    // P(T > t) = I_{df/(df+t^2)}(df/2, 1/2) / 2 for t > 0
    double alpha = 2.0 * (1.0 - p);
    double x = incomplete_beta_inv(df / 2.0, 0.5, alpha);
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(df * (1.0 - x) / x);
}

} // namespace metaweave::stats
