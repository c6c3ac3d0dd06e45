#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "scorebench/errors.hpp"
#include "scorebench/panel.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"
#include "scorebench/synthetic.hpp"

using namespace scorebench;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

bool throws_code(Err code, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("load_csv round-trips a well-formed file") {
    auto path = write_temp("sb_ok.csv",
                           "date,A,B\n"
                           "2020-01-01,1.25,2.5\n"
                           "2020-01-02,1.5,2.25\n"
                           "2020-01-03,1.75,2\n");
    SeriesPanel panel = load_csv(path);
    CHECK(panel.rows() == 3);
    CHECK(panel.cols() == 2);
    CHECK(panel.kind == PanelKind::Levels);
    CHECK(panel.labels[0] == "A");
    CHECK(panel.values(1, 0) == 1.5);
    CHECK(panel.dates[2].iso() == "2020-01-03");
}

TEST_CASE("load_csv rejects duplicate dates, NaNs and missing columns") {
    auto dup = write_temp("sb_dup.csv",
                          "date,A,B\n2020-01-01,1,2\n2020-01-02,1,2\n2020-01-02,1,2\n");
    CHECK(throws_code(Err::NonMonotoneDates, [&] { load_csv(dup); }));

    auto nan = write_temp("sb_nan.csv", "date,A,B\n2020-01-01,1,2\n2020-01-02,NaN,2\n");
    CHECK(throws_code(Err::NonFiniteValue, [&] { load_csv(nan); }));
    try {
        load_csv(nan);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);  // file line number
        CHECK(std::string(e.what()).find("'A'") != std::string::npos);
    }

    auto missing = write_temp("sb_missing.csv", "date,A,B\n2020-01-01,1\n");
    CHECK(throws_code(Err::MissingColumn, [&] { load_csv(missing); }));

    auto bad_date = write_temp("sb_bad_date.csv", "date,A,B\n01/02/2020,1,2\n");
    CHECK(throws_code(Err::UnparseableDate, [&] { load_csv(bad_date); }));

    auto univariate = write_temp("sb_uni.csv", "date,A\n2020-01-01,1\n");
    CHECK(throws_code(Err::MissingColumn, [&] { load_csv(univariate); }));
}

TEST_CASE("write_csv/load_csv reproduces values exactly") {
    GeneratorSpec spec;
    SeriesPanel panel = generate_synthetic_panel(spec, 40, 3, 11);
    auto path = (std::filesystem::temp_directory_path() / "sb_roundtrip.csv").string();
    write_csv(panel, path);
    SeriesPanel re = load_csv(path);
    REQUIRE(re.rows() == panel.rows());
    for (Eigen::Index r = 0; r < panel.rows(); ++r)
        for (Eigen::Index c = 0; c < panel.cols(); ++c) CHECK(re.values(r, c) == panel.values(r, c));
}

TEST_CASE("to_changes computes log returns and differences") {
    SeriesPanel levels;
    levels.name = "lv";
    levels.kind = PanelKind::Levels;
    levels.labels = {"A", "B"};
    levels.dates = {Date{2020, 1, 1}, Date{2020, 1, 2}, Date{2020, 1, 3}};
    levels.values.resize(3, 2);
    double e = std::exp(1.0);
    levels.values << 1.0, 5.0, e, 4.5, e * e, 4.7;

    SeriesPanel logret = to_changes(levels, ChangeMode::LogReturn);
    CHECK(logret.rows() == 2);
    CHECK(logret.kind == PanelKind::LogReturns);
    CHECK(logret.values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(logret.values(1, 0) == doctest::Approx(1.0).epsilon(1e-12));

    SeriesPanel diff = to_changes(levels, ChangeMode::Difference);
    CHECK(diff.values(0, 1) == doctest::Approx(-0.5));
    CHECK(diff.values(1, 1) == doctest::Approx(0.2));

    levels.values(1, 0) = -1.0;
    CHECK(throws_code(Err::NonPositiveLevel, [&] { to_changes(levels, ChangeMode::LogReturn); }));
}

TEST_CASE("changes reconstruct levels") {
    GeneratorSpec spec;
    SeriesPanel returns = generate_synthetic_panel(spec, 200, 2, 3);
    SeriesPanel levels;
    levels.name = "lv";
    levels.kind = PanelKind::Levels;
    levels.labels = returns.labels;
    levels.dates.assign(returns.dates.begin(), returns.dates.end());
    levels.dates.insert(levels.dates.begin(), Date{1998, 12, 31});
    levels.values.resize(returns.rows() + 1, returns.cols());
    levels.values.row(0).setConstant(100.0);
    for (Eigen::Index r = 0; r < returns.rows(); ++r)
        for (Eigen::Index c = 0; c < returns.cols(); ++c)
            levels.values(r + 1, c) = levels.values(r, c) * std::exp(returns.values(r, c));

    SeriesPanel back = to_changes(levels, ChangeMode::LogReturn);
    double cumulative = levels.values(0, 0);
    for (Eigen::Index r = 0; r < back.rows(); ++r) {
        cumulative *= std::exp(back.values(r, 0));
        CHECK(cumulative == doctest::Approx(levels.values(r + 1, 0)).epsilon(1e-12));
    }
}

TEST_CASE("summary statistics: gaussian kurtosis near 3") {
    // Monte Carlo oracle: a standard normal column of a million draws has raw
    // standardized fourth moment 3.
    Rng rng(2024);
    SeriesPanel panel;
    panel.name = "mc";
    panel.kind = PanelKind::LogReturns;
    panel.labels = {"A", "B"};
    const int T = 1000000;
    panel.values.resize(T, 2);
    panel.dates.reserve(T);
    Date d{1980, 1, 1};
    for (int t = 0; t < T; ++t) {
        panel.values(t, 0) = rng.normal();
        panel.values(t, 1) = rng.normal();
        panel.dates.push_back(d);
        d = Date::from_serial(d.serial() + 1);
    }
    SummaryStats stats = summary_statistics(panel);
    CHECK(std::abs(stats.kurtosis[0] - 3.0) < 0.05);
    CHECK(std::abs(stats.skewness[0]) < 0.05);
    CHECK(stats.volatility[0] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("summary statistics edge cases") {
    SeriesPanel panel;
    panel.name = "edge";
    panel.kind = PanelKind::Levels;
    panel.labels = {"A", "B"};
    panel.dates = {Date{2020, 1, 1}, Date{2020, 1, 2}, Date{2020, 1, 3}, Date{2020, 1, 4}};
    panel.values.resize(4, 2);

    SUBCASE("constant column errors") {
        panel.values << 1, 1, 1, 2, 1, 3, 1, 4;
        CHECK(throws_code(Err::DegenerateColumn, [&] { summary_statistics(panel); }));
    }
    SUBCASE("symmetric column has zero mean and skewness") {
        double a = 0.7;
        panel.values << -a, 1, a, 2, -a, 3, a, 4;
        SummaryStats stats = summary_statistics(panel);
        CHECK(stats.mean[0] == doctest::Approx(0.0));
        CHECK(stats.skewness[0] == doctest::Approx(0.0));
    }
}

TEST_CASE("synthetic panels are pure functions of (spec, T, d, seed)") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TCopulaGarch;
    SeriesPanel a = generate_synthetic_panel(spec, 300, 4, 7);
    SeriesPanel b = generate_synthetic_panel(spec, 300, 4, 7);
    CHECK(a.values == b.values);
    CHECK(a.dates[0].iso() == b.dates[0].iso());
    SeriesPanel c = generate_synthetic_panel(spec, 300, 4, 8);
    CHECK(a.values != c.values);
}

TEST_CASE("gaussian generator with zero correlation has near-zero cross correlation") {
    GeneratorSpec spec;
    spec.rho = 0.0;
    SeriesPanel panel = generate_synthetic_panel(spec, 100000, 3, 5);
    std::vector<double> x(100000), y(100000);
    for (int t = 0; t < 100000; ++t) {
        x[static_cast<std::size_t>(t)] = panel.values(t, 0);
        y[static_cast<std::size_t>(t)] = panel.values(t, 2);
    }
    CHECK(std::abs(pearson_correlation(x, y)) < 0.02);
}

TEST_CASE("t-copula-garch generator shows volatility clustering") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TCopulaGarch;
    spec.garch_alpha = 0.08;
    spec.garch_beta = 0.90;  // alpha + beta = 0.98
    SeriesPanel panel = generate_synthetic_panel(spec, 200000, 2, 13);
    // Lag-1 autocorrelation of squared returns must be positive.
    std::vector<double> sq(static_cast<std::size_t>(panel.rows()));
    for (Eigen::Index t = 0; t < panel.rows(); ++t)
        sq[static_cast<std::size_t>(t)] = panel.values(t, 0) * panel.values(t, 0);
    std::vector<double> head(sq.begin(), sq.end() - 1), tail(sq.begin() + 1, sq.end());
    CHECK(pearson_correlation(head, tail) > 0.02);
}

TEST_CASE("garch generator unconditional variance matches omega/(1-alpha-beta)") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TCopulaGarch;
    spec.vol = 0.02;  // target unconditional standard deviation
    SeriesPanel panel = generate_synthetic_panel(spec, 1000000, 2, 21);
    double var = 0.0;
    for (Eigen::Index t = 0; t < panel.rows(); ++t)
        var += panel.values(t, 1) * panel.values(t, 1);
    var /= static_cast<double>(panel.rows());
    CHECK(var == doctest::Approx(0.0004).epsilon(0.05));
}
