#include "scorebench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "scorebench/errors.hpp"

namespace scorebench {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double norm_inv_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(Err::NonFiniteValue, "norm_inv_cdf: p must lie in (0,1)");

    // Acklam's rational approximation, |error| < 1.15e-9.
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
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against erfc brings the result to ~1e-15.
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double student_t_std_log_pdf(double z, double nu) {
    // Density of T*sqrt((nu-2)/nu) where T is standard Student-t(nu).
    double s = nu - 2.0;
    double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(M_PI * s);
    return log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / s);
}

double student_t_std_pdf(double z, double nu) { return std::exp(student_t_std_log_pdf(z, nu)); }

double student_t_std_abs_mean(double nu) {
    return 2.0 * std::sqrt(nu - 2.0) *
           std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
           ((nu - 1.0) * std::sqrt(M_PI));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) fail(Err::EmptyInput, "mean of empty series");
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) fail(Err::EmptyInput, "variance needs at least 2 points");
    double mu = mean(xs);
    KahanSum s;
    for (double x : xs) s.add((x - mu) * (x - mu));
    return s.value() / static_cast<double>(xs.size() - 1);
}

double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double empirical_quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) fail(Err::EmptyInput, "quantile of empty series");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    return empirical_quantile_sorted(xs, q);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        fail(Err::LengthMismatch, "pearson_correlation: length mismatch or too short");
    double ma = mean(a);
    double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma;
        double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) fail(Err::DegenerateColumn, "pearson_correlation: constant input");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace scorebench
