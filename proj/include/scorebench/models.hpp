// The eight distribution-forecasting models: EDF + Gaussian copula, factor
// quantile (AL/AB) variants, and CCC/DCC multivariate GARCH with Student-t
// E-GARCH(1,1) marginals. Each model is fit on a rolling calibration window
// and sampled to produce a one-step-ahead forecast ensemble.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scorebench/dates.hpp"
#include "scorebench/monotone_curve.hpp"
#include "scorebench/panel.hpp"

namespace scorebench {

// ---------------------------------------------------------------------------
// Calibration windows

struct CalibrationWindow {
    Eigen::MatrixXd values;  // n x d, most recent n rows
    Date end_date;           // date of the last row in the window
};

// Window of the `length` rows ending at `end_row` (inclusive). Throws
// Err::InsufficientHistory when the panel is too short.
CalibrationWindow make_window(const SeriesPanel& panel, Eigen::Index end_row, int length);

// ---------------------------------------------------------------------------
// EDF marginals + Gaussian copula

struct EdfCopulaModel {
    std::vector<std::vector<double>> support;  // per column, sorted ascending
    Eigen::MatrixXd correlation;               // Gaussian-copula correlation
};

// Marginal EDF support is the sorted window column; the copula correlation is
// the Pearson correlation of normal scores Phi^-1((rank - 0.5)/n), clipped to
// positive semi-definite.
EdfCopulaModel fit_edf_copula(const CalibrationWindow& window);

Eigen::MatrixXd sample_edf_copula(const EdfCopulaModel& model, int n_draws,
                                  std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Principal-component factors

enum class PcSelection { FirstM, LastM };

struct PcaFactors {
    Eigen::MatrixXd factors;      // T x m scores of the selected components
    Eigen::MatrixXd vectors;      // d x m eigenvectors (columns)
    Eigen::VectorXd eigenvalues;  // m, ordered to match
};

// Eigendecomposition of the window covariance with eigenvalues sorted
// descending. FirstM picks the leading components, LastM the trailing ones.
// Sign convention: each eigenvector's largest-magnitude entry is positive.
PcaFactors pca_factors(const CalibrationWindow& window, PcSelection which, int m);

// ---------------------------------------------------------------------------
// Factor quantile models

enum class FqVariant { AL, AB };

struct FqModel {
    FqVariant variant = FqVariant::AL;
    int factor_count = 1;
    std::vector<double> quantiles;                        // strictly increasing in (0,1)
    std::vector<std::vector<Eigen::VectorXd>> coef;       // [variable][tau] averaged coefficients
    std::vector<std::vector<std::vector<Eigen::VectorXd>>> bag_coef;  // AB: [bag][variable][tau]
    std::vector<MonotoneQuantileCurve> curves;            // per-variable inverse CDF
    Eigen::MatrixXd correlation;                          // Gaussian-copula correlation
    int bags = 0;
};

struct FqOptions {
    FqVariant variant = FqVariant::AL;
    int factor_count = 1;
    std::vector<double> quantiles;  // empty -> 0.05, 0.10, ..., 0.95
    int bags = 50;                  // AB only
    bool identity_bags = false;     // test hook: every bag is the identity resample
};

std::vector<double> default_quantile_partition();

// Quantile regressions of each variable on [1, selected PC factors]; fitted
// quantiles are evaluated at factor value 0 (the factors' unconditional
// mean), rearranged monotone, and splined into an inverse CDF per variable.
// The AB variant averages coefficients over bootstrap resamples of the window
// rows (seeded by rng_seed).
FqModel fit_fq(const CalibrationWindow& window, const FqOptions& options, std::uint64_t rng_seed);

Eigen::MatrixXd sample_fq(const FqModel& model, int n_draws, std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Student-t E-GARCH(1,1) marginals

// ln s2_t = omega + alpha (|z_{t-1}| - E|z|) + gamma z_{t-1} + beta ln s2_{t-1},
// z_t = eps_t / s_t, z ~ Student-t(nu) standardized to unit variance.
struct EgarchTParams {
    double omega = 0.0;
    double alpha = 0.0;        // size response
    double gamma = 0.0;        // sign / leverage response
    double beta = 0.0;         // persistence, |beta| < 1
    double nu = 8.0;           // degrees of freedom, > 2
    double mean = 0.0;         // subtracted column mean
    double last_logvar = 0.0;  // ln s2_T
    double last_z = 0.0;       // z_T
    double next_logvar = 0.0;  // one-step-ahead ln s2_{T+1}
    double loglik = 0.0;
};

// Maximum likelihood via Nelder-Mead from 5 deterministic starts. Throws
// Err::NonConvergence for degenerate input (e.g. a constant series) or when
// no start produces a finite likelihood.
EgarchTParams fit_egarch_t(const std::vector<double>& series);

// Runs the variance filter, returning standardized residuals. Also exposes
// the log-variance path when wanted.
std::vector<double> egarch_filter(const EgarchTParams& params, const std::vector<double>& series,
                                  std::vector<double>* logvar_path = nullptr);

// Simulates a series from the recursion (test/DGP utility).
std::vector<double> simulate_egarch_t(double omega, double alpha, double gamma, double beta,
                                      double nu, int T, std::uint64_t seed);

// Constant-correlation panel of EGARCH-t columns, all sharing `params`.
Eigen::MatrixXd simulate_constant_corr_egarch(const EgarchTParams& params,
                                              const Eigen::MatrixXd& correlation, int T,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multivariate GARCH

enum class MvGarchKind { CCC, DCC };

struct MvGarchModel {
    MvGarchKind kind = MvGarchKind::CCC;
    std::vector<EgarchTParams> univariate;  // one per column
    Eigen::VectorXd means;                  // column means removed before fitting
    Eigen::MatrixXd constant_correlation;   // CCC C (also kept for DCC diagnostics)
    // DCC state
    double dcc_alpha = 0.0;
    double dcc_beta = 0.0;
    Eigen::MatrixXd q_bar;   // unconditional z-covariance target
    Eigen::MatrixXd q_last;  // Q_{T+1} after the last update
    Eigen::VectorXd z_last;
    // One-step-ahead forecast state
    Eigen::VectorXd next_sigma;         // per-column volatility forecasts
    Eigen::MatrixXd next_correlation;   // C_{T+1}
};

// Two-step estimation: univariate E-GARCH fits per column, then either the
// sample correlation of standardized residuals (CCC) or correlation-targeted
// (alpha, beta) maximizing the Gaussian DCC likelihood (DCC). Reuses
// `univariate` fits when provided (they are deterministic, so CCC and DCC
// share identical marginal parameters either way).
MvGarchModel fit_mv_garch(const CalibrationWindow& window, MvGarchKind kind,
                          const std::vector<EgarchTParams>* univariate = nullptr);

// Minimum window length accepted by fit_mv_garch; shorter windows (e.g. the
// 250-day calibration) are rejected with Err::InsufficientWindow because the
// likelihood optimization is unreliable there.
inline constexpr int kMinGarchWindow = 1000;

// draws = mean + D_{t+1} L u with L the Cholesky factor of C_{t+1} and u
// coordinatewise independent standardized Student-t(nu_k).
Eigen::MatrixXd sample_mv_garch(const MvGarchModel& model, int n_draws, std::uint64_t rng_seed);

// Normalizes a PSD matrix to a correlation matrix diag(Q)^-1/2 Q diag(Q)^-1/2.
Eigen::MatrixXd normalize_to_correlation(const Eigen::MatrixXd& q);

// ---------------------------------------------------------------------------
// Model roster

enum class ModelKind { EdfCopula, FqAL, FqAB, CccGarch, DccGarch };

ModelKind model_kind_from_name(const std::string& name);
const char* model_kind_name(ModelKind kind);

struct ModelSpec {
    ModelKind kind = ModelKind::EdfCopula;
    std::string name;               // unique roster id, e.g. "EDF-C-250"
    int window = 250;               // calibration length n
    int factors = 1;                // FQ latent-factor count
    std::vector<double> quantiles;  // FQ partition; empty -> default
    int bags = 50;                  // FQ-AB bag count
};

// The eight-model roster: EDF-C, FQ-AL, FQ-AB at n in {250, 2000} plus
// CCC-GARCH and DCC-GARCH at n = 2000.
std::vector<ModelSpec> default_roster();

struct CalibratedModel {
    std::string model_id;
    Date window_end;
    std::uint64_t fit_seed = 0;
    std::variant<EdfCopulaModel, FqModel, MvGarchModel> impl;
};

CalibratedModel fit_model(const ModelSpec& spec, const CalibrationWindow& window,
                          std::uint64_t fit_seed);

Eigen::MatrixXd sample_model(const CalibratedModel& model, int n_draws, std::uint64_t rng_seed);

// Versioned JSON round trip for calibrated-model caching.
nlohmann::ordered_json calibrated_model_to_json(const CalibratedModel& model);
CalibratedModel calibrated_model_from_json(const nlohmann::ordered_json& doc);

}  // namespace scorebench
