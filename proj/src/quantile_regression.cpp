#include "scorebench/quantile_regression.hpp"

#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

double pinball_loss(const Eigen::VectorXd& residuals, double tau) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        double u = residuals(i);
        total += u * (tau - (u < 0.0 ? 1.0 : 0.0));
    }
    return total;
}

Eigen::VectorXd quantile_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double tau, const QuantileRegressionOptions& options,
                                    const Eigen::VectorXd* init) {
    const Eigen::Index T = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != T) fail(Err::LengthMismatch, "quantile_regression: X/y row mismatch");
    if (T <= k) fail(Err::InsufficientWindow, "quantile_regression: need T > number of regressors");
    if (!(tau > 0.0 && tau < 1.0))
        fail(Err::ConfigError, "quantile_regression: tau must lie in (0,1)");

    // Stationarity condition of the smoothed objective
    //   1/2 sum sqrt(u^2 + d^2) + (tau - 1/2) sum u,  u = y - X b:
    //   X' W (y - X b) + (2 tau - 1) X' 1 = 0,  W = diag(1/sqrt(u^2 + d^2)).
    Eigen::VectorXd b = init ? *init
                             : Eigen::VectorXd((X.transpose() * X)
                                                   .ldlt()
                                                   .solve(X.transpose() * y));
    Eigen::VectorXd best_b = b;
    double initial_loss = pinball_loss(y - X * b, tau);
    double best_loss = initial_loss;

    double y_scale = 1.0;
    {
        double sd = std::sqrt((y.array() - y.mean()).square().sum() /
                              std::max<double>(1.0, static_cast<double>(T - 1)));
        if (sd > 0.0 && std::isfinite(sd)) y_scale = sd;
    }
    const Eigen::VectorXd xt_ones = X.transpose() * Eigen::VectorXd::Ones(T);

    double delta_rel = options.smoothing_start;
    int iterations = 0;
    bool improved = false;
    while (iterations < options.max_iterations) {
        double delta = delta_rel * y_scale;
        bool stage_converged = false;
        while (iterations < options.max_iterations && !stage_converged) {
            ++iterations;
            Eigen::VectorXd u = y - X * b;
            Eigen::VectorXd w(T);
            for (Eigen::Index i = 0; i < T; ++i)
                w(i) = 1.0 / std::sqrt(u(i) * u(i) + delta * delta);
            Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
            Eigen::VectorXd rhs = X.transpose() * (w.asDiagonal() * y) + (2.0 * tau - 1.0) * xt_ones;
            Eigen::VectorXd b_new = xtwx.ldlt().solve(rhs);
            if (!b_new.allFinite()) break;
            double step = (b_new - b).norm();
            b = b_new;
            double loss = pinball_loss(y - X * b, tau);
            if (loss <= best_loss) {
                if (loss < best_loss) improved = true;
                best_loss = loss;
                best_b = b;
            }
            stage_converged = step <= options.coefficient_tolerance * (1.0 + b.norm());
        }
        if (delta_rel <= options.smoothing_end) break;
        delta_rel = std::max(options.smoothing_end, delta_rel * 0.1);
    }

    if (!improved && best_loss > initial_loss * (1.0 + 1e-12) + 1e-300)
        fail(Err::SolverDivergence, "quantile_regression failed to reduce the pinball loss");
    return best_b;
}

}  // namespace scorebench
