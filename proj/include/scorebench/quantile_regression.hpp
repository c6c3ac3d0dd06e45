// Pinball-loss linear quantile regression.
#pragma once

#include <Eigen/Dense>

namespace scorebench {

// rho_tau(u) = u * (tau - 1{u < 0}), summed over residuals.
double pinball_loss(const Eigen::VectorXd& residuals, double tau);

struct QuantileRegressionOptions {
    int max_iterations = 200;
    double smoothing_start = 1e-2;  // initial |u| ~ sqrt(u^2 + delta^2) smoothing
    double smoothing_end = 1e-6;
    double coefficient_tolerance = 1e-10;
};

// Minimizes sum_i rho_tau(y_i - x_i' b) by iteratively reweighted least
// squares on a smoothed absolute value, with the smoothing parameter driven
// down to smoothing_end. X must include the intercept column if one is
// wanted. Optionally warm-started from `init`.
Eigen::VectorXd quantile_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double tau, const QuantileRegressionOptions& options = {},
                                    const Eigen::VectorXd* init = nullptr);

}  // namespace scorebench
