// Monotone inverse-CDF built from fitted quantiles.
#pragma once

#include <vector>

namespace scorebench {

// Piecewise-cubic monotone interpolation (Fritsch-Carlson slopes) through
// (tau_k, q_k) knots with flat extrapolation outside [tau_min, tau_max].
// Crossing quantiles are repaired by rearranging q into non-decreasing order
// before fitting, so the result is always a valid inverse CDF.
class MonotoneQuantileCurve {
  public:
    MonotoneQuantileCurve() = default;
    MonotoneQuantileCurve(std::vector<double> taus, std::vector<double> fitted_quantiles);

    double operator()(double u) const;

    const std::vector<double>& knots_tau() const { return tau_; }
    const std::vector<double>& knots_q() const { return q_; }

  private:
    std::vector<double> tau_;
    std::vector<double> q_;      // non-decreasing after rearrangement
    std::vector<double> slope_;  // Hermite endpoint slopes
};

}  // namespace scorebench
