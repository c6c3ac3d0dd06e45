#include <cmath>
#include <limits>

#include "scorebench/errors.hpp"
#include "scorebench/linalg.hpp"
#include "scorebench/models.hpp"
#include "scorebench/nelder_mead.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EgarchLikelihood {
    const std::vector<double>* eps;  // demeaned series
    double logvar0;                  // ln(sample variance), recursion start
    double logvar_lo, logvar_hi;     // explosion guard

    // params = (omega, alpha, gamma, beta, nu); returns mean negative
    // log-likelihood, +inf outside the admissible box.
    double operator()(const Eigen::VectorXd& p) const {
        double omega = p(0), alpha = p(1), gamma = p(2), beta = p(3), nu = p(4);
        if (std::abs(beta) > 0.999 || nu <= 2.05 || nu > 200.0) return kInf;
        if (std::abs(alpha) > 5.0 || std::abs(gamma) > 5.0 || std::abs(omega) > 50.0) return kInf;

        const double e_abs = student_t_std_abs_mean(nu);
        const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                                0.5 * std::log(M_PI * (nu - 2.0));
        const double half_nu1 = 0.5 * (nu + 1.0);
        double lv = logvar0;
        double ll = 0.0;
        for (double e : *eps) {
            double inv_sigma = std::exp(-0.5 * lv);
            double z = e * inv_sigma;
            ll += log_norm - half_nu1 * std::log1p(z * z / (nu - 2.0)) - 0.5 * lv;
            lv = omega + alpha * (std::abs(z) - e_abs) + gamma * z + beta * lv;
            if (lv < logvar_lo) lv = logvar_lo;
            if (lv > logvar_hi) lv = logvar_hi;
        }
        if (!std::isfinite(ll)) return kInf;
        return -ll / static_cast<double>(eps->size());
    }
};

}  // namespace

EgarchTParams fit_egarch_t(const std::vector<double>& series) {
    if (series.size() < 250)
        fail(Err::InsufficientWindow, "fit_egarch_t: need at least 250 observations");
    double mu = mean(series);
    std::vector<double> eps(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) eps[i] = series[i] - mu;
    double s2 = 0.0;
    for (double e : eps) s2 += e * e;
    s2 /= static_cast<double>(eps.size() - 1);
    if (!(s2 > 0.0) || !std::isfinite(s2))
        fail(Err::NonConvergence, "fit_egarch_t: zero-variance (degenerate) series");

    const double lv0 = std::log(s2);
    EgarchLikelihood nll{&eps, lv0, lv0 - 30.0, lv0 + 30.0};

    auto start = [&](double a, double g, double b, double nu) {
        Eigen::VectorXd p(5);
        p << (1.0 - b) * lv0, a, g, b, nu;
        return p;
    };
    std::vector<Eigen::VectorXd> starts = {
        start(0.10, -0.05, 0.94, 8.0), start(0.05, 0.00, 0.90, 6.0),
        start(0.15, -0.10, 0.97, 12.0), start(0.02, 0.02, 0.50, 20.0),
        start(0.00, 0.00, 0.00, 7.0),
    };

    NelderMeadOptions options;
    options.tolerance = 1e-8;
    options.max_iterations = 1500;
    options.initial_step = 0.05;
    NelderMeadResult best = nelder_mead_multistart(nll, starts, options);
    if (!std::isfinite(best.value))
        fail(Err::NonConvergence, "fit_egarch_t: no start produced a finite likelihood");

    EgarchTParams params;
    params.omega = best.x(0);
    params.alpha = best.x(1);
    params.gamma = best.x(2);
    params.beta = best.x(3);
    params.nu = best.x(4);
    params.mean = mu;
    params.loglik = -best.value * static_cast<double>(eps.size());

    // One more pass of the filter to capture the forecast state.
    std::vector<double> logvar;
    std::vector<double> z = egarch_filter(params, eps, &logvar);
    params.last_logvar = logvar.back();
    params.last_z = z.back();
    double e_abs = student_t_std_abs_mean(params.nu);
    params.next_logvar = params.omega + params.alpha * (std::abs(params.last_z) - e_abs) +
                         params.gamma * params.last_z + params.beta * params.last_logvar;
    return params;
}

std::vector<double> egarch_filter(const EgarchTParams& params, const std::vector<double>& series,
                                  std::vector<double>* logvar_path) {
    // `series` must already be demeaned; the filter starts at ln of the raw
    // second moment, exactly like the likelihood used for fitting.
    if (series.empty()) fail(Err::EmptyInput, "egarch_filter: empty series");
    const double e_abs = student_t_std_abs_mean(params.nu);
    double s2 = 0.0;
    for (double x : series) s2 += x * x;
    s2 /= static_cast<double>(std::max<std::size_t>(series.size() - 1, 1));
    if (!(s2 > 0.0)) fail(Err::NonConvergence, "egarch_filter: degenerate series");
    double lv = std::log(s2);
    const double lo = lv - 30.0, hi = lv + 30.0;

    std::vector<double> z(series.size());
    if (logvar_path) logvar_path->resize(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (logvar_path) (*logvar_path)[t] = lv;
        z[t] = series[t] * std::exp(-0.5 * lv);
        lv = params.omega + params.alpha * (std::abs(z[t]) - e_abs) + params.gamma * z[t] +
             params.beta * lv;
        if (lv < lo) lv = lo;
        if (lv > hi) lv = hi;
    }
    return z;
}

std::vector<double> simulate_egarch_t(double omega, double alpha, double gamma, double beta,
                                      double nu, int T, std::uint64_t seed) {
    if (T < 1) fail(Err::ConfigError, "simulate_egarch_t: T must be positive");
    Rng rng(seed);
    const double e_abs = student_t_std_abs_mean(nu);
    double lv = omega / (1.0 - beta);  // unconditional level
    std::vector<double> out(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        double z = rng.student_t_std(nu);
        out[static_cast<std::size_t>(t)] = std::exp(0.5 * lv) * z;
        lv = omega + alpha * (std::abs(z) - e_abs) + gamma * z + beta * lv;
    }
    return out;
}

Eigen::MatrixXd simulate_constant_corr_egarch(const EgarchTParams& params,
                                              const Eigen::MatrixXd& correlation, int T,
                                              std::uint64_t seed) {
    const Eigen::Index d = correlation.rows();
    Eigen::MatrixXd chol = safe_cholesky(correlation);
    Rng rng(seed);
    const double e_abs = student_t_std_abs_mean(params.nu);
    Eigen::VectorXd lv = Eigen::VectorXd::Constant(d, params.omega / (1.0 - params.beta));
    Eigen::MatrixXd out(T, d);
    Eigen::VectorXd raw(d);
    for (int t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < d; ++k) raw(k) = rng.student_t_std(params.nu);
        Eigen::VectorXd z = chol * raw;
        for (Eigen::Index k = 0; k < d; ++k) {
            out(t, k) = std::exp(0.5 * lv(k)) * z(k);
            lv(k) = params.omega + params.alpha * (std::abs(z(k)) - e_abs) +
                    params.gamma * z(k) + params.beta * lv(k);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multivariate GARCH

Eigen::MatrixXd normalize_to_correlation(const Eigen::MatrixXd& q) {
    const Eigen::Index d = q.rows();
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double qi = q(i, i);
        if (!(qi > 0.0)) fail(Err::SingularCovariance, "normalize_to_correlation: bad diagonal");
        for (Eigen::Index j = 0; j < d; ++j) c(i, j) = q(i, j) / std::sqrt(qi * q(j, j));
    }
    return c;
}

namespace {

struct DccLikelihood {
    const Eigen::MatrixXd* z;  // T x d standardized residuals
    const Eigen::MatrixXd* q_bar;

    double operator()(const Eigen::VectorXd& p) const {
        double a = p(0), b = p(1);
        if (a < 0.0 || b < 0.0 || a + b > 0.999) return kInf;
        const Eigen::Index T = z->rows();
        const Eigen::Index d = z->cols();
        Eigen::MatrixXd q = *q_bar;
        double ll = 0.0;
        for (Eigen::Index t = 0; t < T; ++t) {
            Eigen::MatrixXd c = normalize_to_correlation(q);
            Eigen::LLT<Eigen::MatrixXd> llt(c);
            if (llt.info() != Eigen::Success) return kInf;
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
            Eigen::VectorXd zt = z->row(t);
            double quad = zt.dot(llt.solve(zt));
            ll -= 0.5 * (log_det + quad - zt.squaredNorm());
            q = (1.0 - a - b) * (*q_bar) + a * (zt * zt.transpose()) + b * q;
        }
        if (!std::isfinite(ll)) return kInf;
        return -ll / static_cast<double>(T);
    }
};

}  // namespace

MvGarchModel fit_mv_garch(const CalibrationWindow& window, MvGarchKind kind,
                          const std::vector<EgarchTParams>* univariate) {
    const Eigen::Index n = window.values.rows();
    const Eigen::Index d = window.values.cols();
    if (n < kMinGarchWindow)
        fail(Err::InsufficientWindow, "fit_mv_garch: window of " + std::to_string(n) +
                                          " rows is below the required " +
                                          std::to_string(kMinGarchWindow));
    if (!window.values.allFinite()) fail(Err::NonFiniteValue, "fit_mv_garch: non-finite window");

    MvGarchModel model;
    model.kind = kind;
    model.means = window.values.colwise().mean();

    if (univariate) {
        if (static_cast<Eigen::Index>(univariate->size()) != d)
            fail(Err::LengthMismatch, "fit_mv_garch: univariate fit count mismatch");
        model.univariate = *univariate;
    } else {
        model.univariate.reserve(static_cast<std::size_t>(d));
        std::vector<double> column(static_cast<std::size_t>(n));
        for (Eigen::Index c = 0; c < d; ++c) {
            for (Eigen::Index r = 0; r < n; ++r)
                column[static_cast<std::size_t>(r)] = window.values(r, c);
            model.univariate.push_back(fit_egarch_t(column));
        }
    }

    // Standardized residuals from the univariate filters.
    Eigen::MatrixXd z(n, d);
    std::vector<double> demeaned(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < d; ++c) {
        const EgarchTParams& p = model.univariate[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < n; ++r)
            demeaned[static_cast<std::size_t>(r)] = window.values(r, c) - p.mean;
        std::vector<double> zc = egarch_filter(p, demeaned);
        for (Eigen::Index r = 0; r < n; ++r) z(r, c) = zc[static_cast<std::size_t>(r)];
    }

    model.constant_correlation = clip_correlation_psd(column_correlation(z));

    model.next_sigma.resize(d);
    for (Eigen::Index c = 0; c < d; ++c)
        model.next_sigma(c) =
            std::exp(0.5 * model.univariate[static_cast<std::size_t>(c)].next_logvar);

    if (kind == MvGarchKind::CCC) {
        model.next_correlation = model.constant_correlation;
        return model;
    }

    // DCC: correlation targeting with Q_bar as the sample second moment of z.
    Eigen::MatrixXd q_bar = z.transpose() * z / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_bar);
    if (es.eigenvalues().minCoeff() < 1e-8) {
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-8);
        q_bar = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
    model.q_bar = q_bar;

    DccLikelihood nll{&z, &model.q_bar};
    std::vector<Eigen::VectorXd> starts;
    for (auto [a, b] : {std::pair{0.02, 0.95}, {0.05, 0.90}, {0.01, 0.80}, {0.10, 0.70},
                        {0.001, 0.001}}) {
        Eigen::VectorXd p(2);
        p << a, b;
        starts.push_back(p);
    }
    NelderMeadOptions options;
    options.tolerance = 1e-8;
    options.max_iterations = 400;
    options.initial_step = 0.02;
    NelderMeadResult best = nelder_mead_multistart(nll, starts, options);
    if (!std::isfinite(best.value))
        fail(Err::NonConvergence, "fit_mv_garch: DCC likelihood failed at every start");
    model.dcc_alpha = best.x(0);
    model.dcc_beta = best.x(1);

    // Re-run the recursion at the optimum to carry Q forward one step.
    Eigen::MatrixXd q = model.q_bar;
    for (Eigen::Index t = 0; t < n; ++t) {
        Eigen::VectorXd zt = z.row(t);
        q = (1.0 - model.dcc_alpha - model.dcc_beta) * model.q_bar +
            model.dcc_alpha * (zt * zt.transpose()) + model.dcc_beta * q;
    }
    model.q_last = q;
    model.z_last = z.row(n - 1);
    model.next_correlation = normalize_to_correlation(q);
    return model;
}

Eigen::MatrixXd sample_mv_garch(const MvGarchModel& model, int n_draws, std::uint64_t rng_seed) {
    if (n_draws < 1) fail(Err::ConfigError, "n_draws must be positive");
    const Eigen::Index d = model.next_correlation.rows();
    Eigen::MatrixXd chol = safe_cholesky(model.next_correlation);
    Rng rng(rng_seed);
    Eigen::MatrixXd draws(n_draws, d);
    Eigen::VectorXd u(d);
    for (int i = 0; i < n_draws; ++i) {
        for (Eigen::Index k = 0; k < d; ++k)
            u(k) = rng.student_t_std(model.univariate[static_cast<std::size_t>(k)].nu);
        Eigen::VectorXd x = chol * u;
        for (Eigen::Index k = 0; k < d; ++k)
            draws(i, k) = model.means(k) + model.next_sigma(k) * x(k);
    }
    return draws;
}

}  // namespace scorebench
