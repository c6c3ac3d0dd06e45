// Scalar distribution functions and numeric helpers used throughout the library.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scorebench {

// Compensated (Kahan) accumulator. Score estimators sum up to ~1e12 terms of
// mixed magnitude; plain accumulation would not keep the two CRPS/ES routes
// within the 1e-12 agreement the tests demand.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Standard normal density / distribution / quantile.
double norm_pdf(double z);
double norm_cdf(double z);
// Inverse of norm_cdf on (0,1), accurate to ~1e-15 (rational approximation
// plus one Halley refinement).
double norm_inv_cdf(double p);

// Standardized Student-t with unit variance (nu > 2).
double student_t_std_pdf(double z, double nu);
double student_t_std_log_pdf(double z, double nu);
// E|Z| for the standardized t, = 2*sqrt(nu-2)*Gamma((nu+1)/2) / ((nu-1)*sqrt(pi)*Gamma(nu/2)).
double student_t_std_abs_mean(double nu);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // n-1 divisor
double stddev(std::span<const double> xs);

// Empirical quantile of unsorted data, linear interpolation between order
// statistics at q*(n-1).
double empirical_quantile(std::vector<double> xs, double q);
double empirical_quantile_sorted(std::span<const double> sorted, double q);

// Pearson correlation of two equally long series.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace scorebench
