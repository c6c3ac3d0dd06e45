#include <algorithm>
#include <cmath>
#include <numeric>

#include "scorebench/errors.hpp"
#include "scorebench/linalg.hpp"
#include "scorebench/models.hpp"
#include "scorebench/quantile_regression.hpp"
#include "scorebench/rng.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

CalibrationWindow make_window(const SeriesPanel& panel, Eigen::Index end_row, int length) {
    if (length < 1) fail(Err::ConfigError, "window length must be positive");
    if (end_row < 0 || end_row >= panel.rows())
        fail(Err::InsufficientHistory, "window end row out of range");
    if (end_row + 1 < length)
        fail(Err::InsufficientHistory,
             "need " + std::to_string(length) + " rows, have " + std::to_string(end_row + 1));
    CalibrationWindow w;
    w.values = panel.values.middleRows(end_row + 1 - length, length);
    w.end_date = panel.dates[static_cast<std::size_t>(end_row)];
    return w;
}

namespace {

void check_window(const CalibrationWindow& window) {
    if (window.values.rows() < 2 || window.values.cols() < 2)
        fail(Err::InsufficientWindow, "window must be at least 2 x 2");
    if (!window.values.allFinite())
        fail(Err::NonFiniteValue, "window contains non-finite values");
}

// Normal scores Phi^-1((rank - 0.5)/n) per column; ties get distinct ordinal
// ranks (stable order), which is immaterial for continuous data.
Eigen::MatrixXd normal_scores(const Eigen::MatrixXd& values) {
    const Eigen::Index n = values.rows();
    const Eigen::Index d = values.cols();
    Eigen::MatrixXd scores(n, d);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < d; ++c) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return values(a, c) < values(b, c); });
        for (Eigen::Index r = 0; r < n; ++r) {
            double u = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
            scores(order[static_cast<std::size_t>(r)], c) = norm_inv_cdf(u);
        }
    }
    return scores;
}

}  // namespace

EdfCopulaModel fit_edf_copula(const CalibrationWindow& window) {
    check_window(window);
    const Eigen::Index n = window.values.rows();
    const Eigen::Index d = window.values.cols();

    EdfCopulaModel model;
    model.support.resize(static_cast<std::size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) {
        auto& col = model.support[static_cast<std::size_t>(c)];
        col.resize(static_cast<std::size_t>(n));
        for (Eigen::Index r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = window.values(r, c);
        std::sort(col.begin(), col.end());
        if (col.front() == col.back())
            fail(Err::DegenerateColumn, "window column " + std::to_string(c) + " is constant");
    }

    model.correlation = clip_correlation_psd(column_correlation(normal_scores(window.values)));
    return model;
}

// Correlated uniforms through the Gaussian copula: u = Phi(L g).
static Eigen::MatrixXd copula_uniforms(const Eigen::MatrixXd& correlation, int n_draws, Rng& rng) {
    const Eigen::Index d = correlation.rows();
    Eigen::MatrixXd chol = safe_cholesky(correlation);
    Eigen::MatrixXd uniforms(n_draws, d);
    Eigen::VectorXd g(d);
    for (int i = 0; i < n_draws; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) g(k) = rng.normal();
        Eigen::VectorXd z = chol * g;
        for (Eigen::Index k = 0; k < d; ++k) uniforms(i, k) = norm_cdf(z(k));
    }
    return uniforms;
}

// Step-function inverse of the EDF: inf{x : F(x) >= u} over the support.
static double edf_inverse(const std::vector<double>& sorted, double u) {
    const std::size_t n = sorted.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return sorted[k - 1];
}

Eigen::MatrixXd sample_edf_copula(const EdfCopulaModel& model, int n_draws,
                                  std::uint64_t rng_seed) {
    if (n_draws < 1) fail(Err::ConfigError, "n_draws must be positive");
    const Eigen::Index d = model.correlation.rows();
    Rng rng(rng_seed);
    Eigen::MatrixXd uniforms = copula_uniforms(model.correlation, n_draws, rng);
    Eigen::MatrixXd draws(n_draws, d);
    for (int i = 0; i < n_draws; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            draws(i, k) = edf_inverse(model.support[static_cast<std::size_t>(k)], uniforms(i, k));
    return draws;
}

// ---------------------------------------------------------------------------
// PCA factors

PcaFactors pca_factors(const CalibrationWindow& window, PcSelection which, int m) {
    check_window(window);
    const Eigen::Index d = window.values.cols();
    if (m < 1 || m >= d)
        fail(Err::ConfigError, "pca_factors: need 1 <= m < d");
    if (window.values.rows() <= d)
        fail(Err::RankDeficientWindow, "window has no more rows than columns");
    for (Eigen::Index c = 0; c < d; ++c)
        if (window.values.col(c).maxCoeff() == window.values.col(c).minCoeff())
            fail(Err::RankDeficientWindow, "window column " + std::to_string(c) + " is constant");

    Eigen::MatrixXd centered = window.values.rowwise() - window.values.colwise().mean();
    Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(window.values.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) fail(Err::SingularCovariance, "eigendecomposition failed");

    // Eigen returns ascending order; flip to descending by eigenvalue.
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    Eigen::MatrixXd vectors = es.eigenvectors().rowwise().reverse();
    if (ev(0) <= 0.0) fail(Err::RankDeficientWindow, "window covariance is degenerate");
    // Collinear-but-noisy columns are fine (a near-zero trailing eigenvalue is
    // exactly what the AL variant feeds on); only a breakdown of the
    // eigensolver is an error.
    if (ev(ev.size() - 1) < -1e-10 * ev(0))
        fail(Err::RankDeficientWindow, "window covariance has a negative eigenvalue");

    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index argmax = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&argmax);
        if (vectors(argmax, c) < 0.0) vectors.col(c) = -vectors.col(c);
    }

    PcaFactors out;
    Eigen::Index start = which == PcSelection::FirstM ? 0 : d - m;
    out.vectors = vectors.middleCols(start, m);
    out.eigenvalues = ev.segment(start, m);
    out.factors = centered * out.vectors;
    return out;
}

// ---------------------------------------------------------------------------
// Factor quantile

std::vector<double> default_quantile_partition() {
    std::vector<double> taus;
    for (int i = 1; i <= 19; ++i) taus.push_back(0.05 * i);
    return taus;
}

FqModel fit_fq(const CalibrationWindow& window, const FqOptions& options, std::uint64_t rng_seed) {
    check_window(window);
    const Eigen::Index n = window.values.rows();
    const Eigen::Index d = window.values.cols();
    const bool bagging = options.variant == FqVariant::AB;
    if (bagging && options.bags < 1) fail(Err::ConfigError, "fit_fq: AB needs bags >= 1");

    FqModel model;
    model.variant = options.variant;
    model.factor_count = options.factor_count;
    model.quantiles = options.quantiles.empty() ? default_quantile_partition() : options.quantiles;
    model.bags = bagging ? options.bags : 0;
    for (std::size_t i = 0; i < model.quantiles.size(); ++i) {
        double tau = model.quantiles[i];
        if (!(tau > 0.0 && tau < 1.0) || (i > 0 && tau <= model.quantiles[i - 1]))
            fail(Err::ConfigError, "fit_fq: quantile partition must strictly increase in (0,1)");
    }

    PcaFactors pca = pca_factors(
        window, options.variant == FqVariant::AL ? PcSelection::LastM : PcSelection::FirstM,
        options.factor_count);

    Eigen::MatrixXd design(n, options.factor_count + 1);
    design.col(0).setOnes();
    design.rightCols(options.factor_count) = pca.factors;

    const std::size_t n_tau = model.quantiles.size();
    model.coef.assign(static_cast<std::size_t>(d), std::vector<Eigen::VectorXd>(n_tau));

    // Full-sample fits (also the warm starts for every bag).
    for (Eigen::Index v = 0; v < d; ++v) {
        Eigen::VectorXd y = window.values.col(v);
        const Eigen::VectorXd* warm = nullptr;
        for (std::size_t q = 0; q < n_tau; ++q) {
            model.coef[static_cast<std::size_t>(v)][q] =
                quantile_regression(design, y, model.quantiles[q], {}, warm);
            warm = &model.coef[static_cast<std::size_t>(v)][q];
        }
    }

    if (bagging) {
        Rng rng(seed_combine(rng_seed, "fq-bagging"));
        model.bag_coef.assign(
            static_cast<std::size_t>(options.bags),
            std::vector<std::vector<Eigen::VectorXd>>(static_cast<std::size_t>(d),
                                                      std::vector<Eigen::VectorXd>(n_tau)));
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
        Eigen::MatrixXd bag_design(n, design.cols());
        Eigen::VectorXd bag_y(n);
        for (int bag = 0; bag < options.bags; ++bag) {
            for (Eigen::Index r = 0; r < n; ++r)
                rows[static_cast<std::size_t>(r)] =
                    options.identity_bags ? r
                                          : static_cast<Eigen::Index>(
                                                rng.index(static_cast<std::size_t>(n)));
            for (Eigen::Index r = 0; r < n; ++r)
                bag_design.row(r) = design.row(rows[static_cast<std::size_t>(r)]);
            for (Eigen::Index v = 0; v < d; ++v) {
                for (Eigen::Index r = 0; r < n; ++r)
                    bag_y(r) = window.values(rows[static_cast<std::size_t>(r)], v);
                for (std::size_t q = 0; q < n_tau; ++q) {
                    const Eigen::VectorXd& warm = model.coef[static_cast<std::size_t>(v)][q];
                    model.bag_coef[static_cast<std::size_t>(bag)][static_cast<std::size_t>(v)][q] =
                        quantile_regression(bag_design, bag_y, model.quantiles[q], {}, &warm);
                }
            }
        }
        // Replace the full-sample coefficients by the bag averages.
        for (Eigen::Index v = 0; v < d; ++v) {
            for (std::size_t q = 0; q < n_tau; ++q) {
                Eigen::VectorXd avg = Eigen::VectorXd::Zero(design.cols());
                for (int bag = 0; bag < options.bags; ++bag)
                    avg += model.bag_coef[static_cast<std::size_t>(bag)]
                                         [static_cast<std::size_t>(v)][q];
                model.coef[static_cast<std::size_t>(v)][q] =
                    avg / static_cast<double>(options.bags);
            }
        }
    }

    // Fitted quantiles at factor value 0 reduce to the intercepts.
    model.curves.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index v = 0; v < d; ++v) {
        std::vector<double> fitted(n_tau);
        for (std::size_t q = 0; q < n_tau; ++q)
            fitted[q] = model.coef[static_cast<std::size_t>(v)][q](0);
        model.curves.emplace_back(model.quantiles, std::move(fitted));
    }

    model.correlation = fit_edf_copula(window).correlation;
    return model;
}

Eigen::MatrixXd sample_fq(const FqModel& model, int n_draws, std::uint64_t rng_seed) {
    if (n_draws < 1) fail(Err::ConfigError, "n_draws must be positive");
    const Eigen::Index d = model.correlation.rows();
    if (static_cast<Eigen::Index>(model.curves.size()) != d)
        fail(Err::LengthMismatch, "sample_fq: curves/correlation mismatch");
    Rng rng(rng_seed);
    Eigen::MatrixXd uniforms = copula_uniforms(model.correlation, n_draws, rng);
    Eigen::MatrixXd draws(n_draws, d);
    for (int i = 0; i < n_draws; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            draws(i, k) = model.curves[static_cast<std::size_t>(k)](uniforms(i, k));
    return draws;
}

}  // namespace scorebench
