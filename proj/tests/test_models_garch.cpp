#include <doctest.h>

#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/linalg.hpp"
#include "scorebench/models.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

using namespace scorebench;

TEST_CASE("egarch-t simulation-recovery at T = 20000") {
    // True recursion parameters; one seeded trial here, the 100-trial version
    // lives in the acceptance suite.
    std::vector<double> series = simulate_egarch_t(-0.1, 0.1, -0.05, 0.95, 7.0, 20000, 4242);
    EgarchTParams fit = fit_egarch_t(series);
    CHECK(std::abs(fit.beta - 0.95) < 0.03);
    CHECK(fit.gamma < 0.0);  // leverage sign recovered
    CHECK(fit.nu > 2.0);
    CHECK(std::abs(fit.beta) < 1.0);
}

TEST_CASE("egarch-t on iid gaussian data degenerates to flat volatility") {
    Rng rng(77);
    std::vector<double> series(20000);
    for (auto& x : series) x = 0.01 * rng.normal();
    EgarchTParams fit = fit_egarch_t(series);
    CHECK(std::abs(fit.alpha) < 0.05);
    // Implied unconditional variance within 5% of the sample variance.
    double implied = std::exp(fit.omega / (1.0 - fit.beta));
    double sample = variance(series);
    CHECK(implied == doctest::Approx(sample).epsilon(0.05));
}

TEST_CASE("egarch-t rejects degenerate series") {
    std::vector<double> constant(500, 1.0);
    CHECK_THROWS_AS(fit_egarch_t(constant), Error);
    std::vector<double> tiny(100, 0.0);
    CHECK_THROWS_AS(fit_egarch_t(tiny), Error);  // below the 250 minimum
}

TEST_CASE("mv-garch refuses short windows") {
    Rng rng(5);
    CalibrationWindow window;
    window.values.resize(250, 2);
    for (int t = 0; t < 250; ++t)
        for (int c = 0; c < 2; ++c) window.values(t, c) = rng.normal();
    window.end_date = Date{2011, 1, 31};
    try {
        fit_mv_garch(window, MvGarchKind::CCC);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::InsufficientWindow);
    }
}

namespace {

CalibrationWindow ccc_window(int n, int d, std::uint64_t seed, double rho) {
    EgarchTParams truth;
    truth.omega = -0.3;
    truth.alpha = 0.1;
    truth.gamma = -0.05;
    truth.beta = 0.95;
    truth.nu = 7.0;
    CalibrationWindow window;
    window.values = simulate_constant_corr_egarch(truth, equicorrelation(d, rho), n, seed);
    window.end_date = Date{2015, 12, 31};
    return window;
}

}  // namespace

TEST_CASE("ccc and dcc share univariate parameters; dcc on null data degenerates to ccc") {
    CalibrationWindow window = ccc_window(2000, 3, 31337, 0.5);

    MvGarchModel ccc = fit_mv_garch(window, MvGarchKind::CCC);
    MvGarchModel dcc = fit_mv_garch(window, MvGarchKind::DCC);

    // Two-step contract: identical univariate parameters.
    REQUIRE(ccc.univariate.size() == dcc.univariate.size());
    for (std::size_t k = 0; k < ccc.univariate.size(); ++k) {
        CHECK(ccc.univariate[k].omega == dcc.univariate[k].omega);
        CHECK(ccc.univariate[k].beta == dcc.univariate[k].beta);
        CHECK(ccc.univariate[k].nu == dcc.univariate[k].nu);
    }

    // Data were simulated with constant correlation (DCC alpha = beta = 0),
    // so the fitted DCC forecast correlation must sit near the CCC one.
    CHECK(dcc.dcc_alpha + dcc.dcc_beta < 0.9995);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(dcc.next_correlation(i, j) - ccc.next_correlation(i, j)) < 0.05);

    // Unit diagonal to 1e-12 everywhere.
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(ccc.next_correlation(i, i) - 1.0) < 1e-12);
        CHECK(std::abs(dcc.next_correlation(i, i) - 1.0) < 1e-12);
    }
}

TEST_CASE("dcc recursion with alpha = beta = 0 reproduces ccc forecasts exactly") {
    CalibrationWindow window = ccc_window(2000, 2, 999, 0.4);
    MvGarchModel ccc = fit_mv_garch(window, MvGarchKind::CCC);

    MvGarchModel dcc = ccc;
    dcc.kind = MvGarchKind::DCC;
    dcc.dcc_alpha = 0.0;
    dcc.dcc_beta = 0.0;
    dcc.q_bar = ccc.constant_correlation;
    dcc.q_last = ccc.constant_correlation;
    dcc.next_correlation = normalize_to_correlation(ccc.constant_correlation);

    // Q_t = Q_bar for all t when alpha = beta = 0, and normalizing a
    // unit-diagonal matrix is the identity, so the sampled forecasts agree
    // bit for bit.
    CHECK(dcc.next_correlation == ccc.next_correlation);
    CHECK(sample_mv_garch(ccc, 500, 2024) == sample_mv_garch(dcc, 500, 2024));
}

TEST_CASE("mv-garch sampling moments") {
    CalibrationWindow window = ccc_window(2000, 2, 555, 0.0);
    MvGarchModel ccc = fit_mv_garch(window, MvGarchKind::CCC);

    SUBCASE("zero correlation in, near-zero sample correlation out") {
        ccc.next_correlation = Eigen::MatrixXd::Identity(2, 2);
        ccc.next_sigma = Eigen::VectorXd::Constant(2, 0.5);
        ccc.means.setZero();
        const int n = 100000;
        Eigen::MatrixXd draws = sample_mv_garch(ccc, n, 8);
        std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            a[static_cast<std::size_t>(i)] = draws(i, 0);
            b[static_cast<std::size_t>(i)] = draws(i, 1);
        }
        CHECK(std::abs(pearson_correlation(a, b)) < 0.02);
    }

    SUBCASE("sample covariance approximates D C D") {
        Eigen::MatrixXd c(2, 2);
        c << 1.0, 0.6, 0.6, 1.0;
        ccc.next_correlation = c;
        ccc.next_sigma << 0.02, 0.05;
        ccc.means.setZero();
        const int n = 1000000;
        Eigen::MatrixXd draws = sample_mv_garch(ccc, n, 9);
        Eigen::MatrixXd cov = draws.transpose() * draws / static_cast<double>(n);
        Eigen::MatrixXd target = ccc.next_sigma.asDiagonal() * c * ccc.next_sigma.asDiagonal();
        CHECK((cov - target).norm() / target.norm() < 0.03);
    }

    SUBCASE("same seed, same draws") {
        CHECK(sample_mv_garch(ccc, 300, 77) == sample_mv_garch(ccc, 300, 77));
    }
}

TEST_CASE("mv-garch json round trip samples identically") {
    CalibrationWindow window = ccc_window(2000, 2, 4141, 0.3);
    MvGarchModel dcc_impl = fit_mv_garch(window, MvGarchKind::DCC);
    CalibratedModel model;
    model.model_id = "DCC-GARCH";
    model.window_end = window.end_date;
    model.fit_seed = 1;
    model.impl = dcc_impl;
    CalibratedModel back = calibrated_model_from_json(calibrated_model_to_json(model));
    CHECK(sample_model(model, 250, 3) == sample_model(back, 250, 3));
}

TEST_CASE("egarch stationarity of accepted fits") {
    std::vector<double> series = simulate_egarch_t(-0.2, 0.12, -0.08, 0.9, 6.0, 4000, 5050);
    EgarchTParams fit = fit_egarch_t(series);
    CHECK(std::abs(fit.beta) < 1.0);
    // Finite implied unconditional variance.
    CHECK(std::isfinite(std::exp(fit.omega / (1.0 - fit.beta))));
}
