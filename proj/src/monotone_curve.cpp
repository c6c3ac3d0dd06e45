#include "scorebench/monotone_curve.hpp"

#include <algorithm>
#include <cmath>

#include "scorebench/errors.hpp"

namespace scorebench {

MonotoneQuantileCurve::MonotoneQuantileCurve(std::vector<double> taus,
                                             std::vector<double> fitted_quantiles)
    : tau_(std::move(taus)), q_(std::move(fitted_quantiles)) {
    if (tau_.size() != q_.size() || tau_.empty())
        fail(Err::LengthMismatch, "MonotoneQuantileCurve: knot size mismatch");
    for (std::size_t i = 0; i < tau_.size(); ++i) {
        if (!(tau_[i] > 0.0 && tau_[i] < 1.0))
            fail(Err::ConfigError, "MonotoneQuantileCurve: taus must lie in (0,1)");
        if (i > 0 && !(tau_[i] > tau_[i - 1]))
            fail(Err::ConfigError, "MonotoneQuantileCurve: taus must strictly increase");
        if (!std::isfinite(q_[i]))
            fail(Err::NonFiniteValue, "MonotoneQuantileCurve: non-finite fitted quantile");
    }

    // Monotone rearrangement repairs quantile crossings.
    std::sort(q_.begin(), q_.end());

    const std::size_t n = tau_.size();
    slope_.assign(n, 0.0);
    if (n == 1) return;

    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        secant[i] = (q_[i + 1] - q_[i]) / (tau_[i + 1] - tau_[i]);

    slope_[0] = secant[0];
    slope_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (secant[i - 1] * secant[i] <= 0.0)
            slope_[i] = 0.0;
        else
            slope_[i] = 0.5 * (secant[i - 1] + secant[i]);
    }
    // Fritsch-Carlson limiter keeps each cubic segment monotone.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (secant[i] == 0.0) {
            slope_[i] = 0.0;
            slope_[i + 1] = 0.0;
            continue;
        }
        double a = slope_[i] / secant[i];
        double b = slope_[i + 1] / secant[i];
        double s = a * a + b * b;
        if (s > 9.0) {
            double t = 3.0 / std::sqrt(s);
            slope_[i] = t * a * secant[i];
            slope_[i + 1] = t * b * secant[i];
        }
    }
}

double MonotoneQuantileCurve::operator()(double u) const {
    if (tau_.empty()) fail(Err::EmptyInput, "MonotoneQuantileCurve: uninitialized");
    if (u <= tau_.front()) return q_.front();
    if (u >= tau_.back()) return q_.back();

    auto it = std::upper_bound(tau_.begin(), tau_.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - tau_.begin());
    std::size_t lo = hi - 1;
    double h = tau_[hi] - tau_[lo];
    double t = (u - tau_[lo]) / h;
    double t2 = t * t;
    double t3 = t2 * t;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    double h10 = t3 - 2.0 * t2 + t;
    double h01 = -2.0 * t3 + 3.0 * t2;
    double h11 = t3 - t2;
    return h00 * q_[lo] + h10 * h * slope_[lo] + h01 * q_[hi] + h11 * h * slope_[hi];
}

}  // namespace scorebench
