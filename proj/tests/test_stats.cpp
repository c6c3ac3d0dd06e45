#include <doctest.h>

#include <cmath>

#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

using namespace scorebench;

TEST_CASE("normal inverse cdf round-trips the cdf") {
    for (double p : {1e-10, 1e-4, 0.01, 0.25, 0.5, 0.75, 0.975, 0.9999, 1.0 - 1e-10}) {
        double z = norm_inv_cdf(p);
        CHECK(norm_cdf(z) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(norm_inv_cdf(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
    CHECK(norm_inv_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("standardized student-t density integrates to one and has unit variance") {
    // Simpson quadrature oracle.
    for (double nu : {4.0, 7.0, 30.0}) {
        auto f = [&](double z) { return student_t_std_pdf(z, nu); };
        auto f2 = [&](double z) { return z * z * student_t_std_pdf(z, nu); };
        const int n = 40001;
        const double lo = -60.0, hi = 60.0, h = (hi - lo) / (n - 1);
        double mass = 0.0, var = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            mass += w * f(lo + i * h);
            var += w * f2(lo + i * h);
        }
        mass *= h / 3.0;
        var *= h / 3.0;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("standardized student-t absolute mean matches quadrature") {
    for (double nu : {4.0, 7.0, 12.0}) {
        const int n = 400001;
        const double lo = 0.0, hi = 500.0, h = (hi - lo) / (n - 1);
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            double z = lo + i * h;
            m += w * 2.0 * z * student_t_std_pdf(z, nu);
        }
        m *= h / 3.0;
        CHECK(student_t_std_abs_mean(nu) == doctest::Approx(m).epsilon(1e-6));
    }
}

TEST_CASE("rng determinism and moment sanity") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

    Rng rng(99);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
    CHECK(std::abs(sum4 / n - 3.0) < 0.1);
}

TEST_CASE("student-t sampler variance matches standardization") {
    Rng rng(7);
    const int n = 400000;
    double nu = 6.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.student_t_std(nu);
        sum2 += z * z;
    }
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("gamma sampler mean and variance") {
    Rng rng(5);
    const int n = 200000;
    double shape = 3.5;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = rng.gamma(shape);
        sum += g;
        sum2 += g * g;
    }
    double m = sum / n;
    CHECK(m == doctest::Approx(shape).epsilon(0.02));
    CHECK(sum2 / n - m * m == doctest::Approx(shape).epsilon(0.05));
}

TEST_CASE("seed derivation separates streams") {
    std::uint64_t root = 42;
    CHECK(seed_combine(root, "ensemble") != seed_combine(root, "realisations"));
    CHECK(seed_combine(root, std::uint64_t{1}) != seed_combine(root, std::uint64_t{2}));
    CHECK(seed_combine(seed_combine(root, "a"), "b") != seed_combine(seed_combine(root, "b"), "a"));
}

TEST_CASE("empirical quantile interpolates order statistics") {
    std::vector<double> xs = {4.0, 1.0, 3.0, 2.0};
    CHECK(empirical_quantile(xs, 0.0) == 1.0);
    CHECK(empirical_quantile(xs, 1.0) == 4.0);
    CHECK(empirical_quantile(xs, 0.5) == doctest::Approx(2.5));
}
