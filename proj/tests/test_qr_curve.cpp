#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "scorebench/errors.hpp"
#include "scorebench/monotone_curve.hpp"
#include "scorebench/quantile_regression.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

using namespace scorebench;

TEST_CASE("quantile regression recovers a noiseless line at every tau") {
    const int T = 200;
    Eigen::MatrixXd X(T, 2);
    Eigen::VectorXd y(T);
    Rng rng(1);
    for (int t = 0; t < T; ++t) {
        double x = rng.normal();
        X(t, 0) = 1.0;
        X(t, 1) = x;
        y(t) = 1.0 + 2.0 * x;
    }
    for (double tau : {0.1, 0.5, 0.9}) {
        Eigen::VectorXd b = quantile_regression(X, y, tau);
        CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(b(1) == doctest::Approx(2.0).epsilon(1e-4));
    }
}

TEST_CASE("quantile regression intercepts shift by the gaussian quantile") {
    const int T = 100000;
    Eigen::MatrixXd X(T, 2);
    Eigen::VectorXd y(T);
    Rng rng(2);
    for (int t = 0; t < T; ++t) {
        double x = rng.normal();
        X(t, 0) = 1.0;
        X(t, 1) = x;
        y(t) = x + rng.normal();
    }
    Eigen::VectorXd b50 = quantile_regression(X, y, 0.5);
    Eigen::VectorXd b90 = quantile_regression(X, y, 0.9);
    CHECK(b90(0) - b50(0) == doctest::Approx(1.2816).epsilon(0.05 / 1.2816));
}

TEST_CASE("quantile regression matches a brute-force grid search") {
    const int T = 20;
    Eigen::MatrixXd X(T, 2);
    Eigen::VectorXd y(T);
    Rng rng(3);
    for (int t = 0; t < T; ++t) {
        double x = rng.normal();
        X(t, 0) = 1.0;
        X(t, 1) = x;
        y(t) = 0.4 + 0.8 * x + 0.5 * rng.normal();
    }
    Eigen::VectorXd grid = oracles::pinball_grid_search(X, y, 0.5, -2.0, 2.0, 400);
    Eigen::VectorXd b = quantile_regression(X, y, 0.5);
    CHECK(std::abs(b(0) - grid(0)) < 0.05);
    CHECK(std::abs(b(1) - grid(1)) < 0.05);
    // The solver's exact pinball loss must not exceed the grid optimum.
    CHECK(pinball_loss(y - X * b, 0.5) <= pinball_loss(y - X * grid, 0.5) + 1e-9);
}

TEST_CASE("quantile regression validates inputs") {
    Eigen::MatrixXd X(2, 2);
    X.setOnes();
    Eigen::VectorXd y(2);
    y.setZero();
    CHECK_THROWS_AS(quantile_regression(X, y, 0.5), Error);  // T <= regressors
    Eigen::MatrixXd X2(5, 2);
    X2.setRandom();
    Eigen::VectorXd y2(5);
    y2.setRandom();
    CHECK_THROWS_AS(quantile_regression(X2, y2, 0.0), Error);
}

TEST_CASE("monotone curve interpolates knots exactly and repairs crossings") {
    MonotoneQuantileCurve curve({0.25, 0.5, 0.75}, {-1.0, 0.0, 1.0});
    CHECK(curve(0.5) == 0.0);
    CHECK(curve(0.25) == -1.0);
    CHECK(curve(0.75) == 1.0);
    // Flat extrapolation.
    CHECK(curve(0.01) == -1.0);
    CHECK(curve(0.99) == 1.0);

    MonotoneQuantileCurve crossed({0.25, 0.5, 0.75}, {0.0, -1.0, 1.0});
    CHECK(crossed(0.25) == -1.0);
    CHECK(crossed(0.5) == 0.0);
    CHECK(crossed(0.75) == 1.0);
    double prev = -10.0;
    for (double u = 0.01; u < 1.0; u += 0.01) {
        CHECK(crossed(u) >= prev - 1e-14);
        prev = crossed(u);
    }
}

TEST_CASE("monotone curve through dense gaussian quantiles is accurate") {
    std::vector<double> taus, qs;
    for (int i = 1; i <= 99; ++i) {
        taus.push_back(0.01 * i);
        qs.push_back(norm_inv_cdf(0.01 * i));
    }
    MonotoneQuantileCurve curve(taus, qs);
    CHECK(curve(0.975) == doctest::Approx(1.95996).epsilon(0.01 / 1.95996));
    CHECK(curve(0.5) == doctest::Approx(0.0).epsilon(1e-6));
    // Monotone everywhere sampled.
    double prev = curve(0.001);
    for (double u = 0.002; u < 0.999; u += 0.001) {
        double v = curve(u);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
}
