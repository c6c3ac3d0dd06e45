// Discrimination metrics over a ScoreTensor: mean relative scores, score
// differences and error rates, the generalized discrimination heuristic,
// bootstrap bands, kernel density summaries and the figure-level aggregates.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scorebench/harness.hpp"

namespace scorebench {

inline constexpr double kRatioGuard = 1e-12;

struct MeanRelativeScore {
    double value = 0.0;
    int excluded = 0;  // pairs dropped by the |S_dgp| < eps guard
};

// (1/N) sum_i S_i(m, m*) / S_i(m*, m*), pairing scores by draw index. Pairs
// with |S_i(m*, m*)| < eps_ratio are excluded and counted; throws
// Err::AllPairsExcluded when nothing survives.
MeanRelativeScore mean_relative_score(std::span<const double> scores_m,
                                      std::span<const double> scores_dgp,
                                      double eps_ratio = kRatioGuard);

// Elementwise S_i(m, m*) - S_i(m*, m*).
std::vector<double> score_differences(std::span<const double> scores_m,
                                      std::span<const double> scores_dgp);

// Fraction of strictly negative entries; ties are not errors.
double error_rate(std::span<const double> diffs);

// d_t^s(m*) = (1/M) sum_m mean(S(m, m*)) / mean(S(m*, m*)), including the
// m = m* self term (which contributes exactly 1/M).
double discrimination_heuristic(std::span<const double> mean_scores, std::size_t dgp_index,
                                double eps_ratio = kRatioGuard);

struct BandEstimate {
    double lower = 0.0;
    double upper = 0.0;
};

// Quantiles of the sub-sample mean: each rep draws `subsample` values with
// replacement and records their mean; the band is the (lo_q, hi_q) empirical
// quantile pair of the rep means.
BandEstimate bootstrap_band(std::span<const double> scores, int subsample = 100, int reps = 5000,
                            double lo_q = 0.25, double hi_q = 0.75, std::uint64_t seed = 0);

// Empirical quantile of bootstrap means over full-size resamples; used for
// one-sided propriety margins.
double bootstrap_mean_quantile(std::span<const double> xs, int reps, double q, std::uint64_t seed);

struct KdeCurve {
    std::vector<double> x;        // 512 uniform points within the clipped range
    std::vector<double> density;  // Gaussian KDE with Silverman bandwidth
    double clip_lo = 0.0;         // 0.001 quantile of the data
    double clip_hi = 0.0;         // 0.999 quantile
    double bandwidth = 0.0;
    double negative_mass = 0.0;   // exact fraction of entries < 0
    double mean = 0.0;            // exact sample mean
};

KdeCurve kde_differences(std::span<const double> diffs, double clip_lo_q = 0.001,
                         double clip_hi_q = 0.999, int grid_points = 512);

// Trailing moving average over min(window, index + 1) observations; output
// length equals input length.
std::vector<double> moving_average(std::span<const double> series, int window = 8);

// ---------------------------------------------------------------------------
// Report over a full tensor

struct MetricReportOptions {
    int subsample = 100;       // bootstrap sub-sample size (clamped to N)
    int bootstrap_reps = 5000;
    std::uint64_t seed = 0;    // derived per slice internally
    double eps_ratio = kRatioGuard;
    int ma_window = 8;
    double propriety_threshold = 0.98;  // mean relative score cutoff per cell
};

struct CellMetrics {
    std::size_t panel, rule, dgp, date, model;
    MeanRelativeScore mean_relative;
    BandEstimate band;
    double error_rate = 0.0;  // only meaningful for model != dgp
    double diff_mean = 0.0;
};

struct HeuristicPoint {
    std::size_t panel, rule, dgp, date;
    double value = 0.0;
    int models_present = 0;
};

struct PooledCurve {
    std::size_t panel, rule, dgp, model;
    KdeCurve curve;
    double pooled_error_rate = 0.0;
};

struct RuleAggregate {
    std::size_t panel, rule;
    double error_rate_mean_cells = 0.0;       // unweighted over (m*, m != m*, t)
    double error_rate_models_then_dates = 0.0;
    double avg_heuristic = 0.0;
    double propriety_cell_share = 0.0;  // share of (t, m*) cells where every
                                        // misspecified model clears the threshold
};

struct MetricReport {
    const ScoreTensor* tensor = nullptr;  // axis metadata
    MetricReportOptions options;
    std::vector<CellMetrics> cells;
    std::vector<HeuristicPoint> heuristics;
    std::vector<PooledCurve> curves;
    std::vector<RuleAggregate> aggregates;
    std::map<std::string, double> rule_avg_error_rate;      // across panels
    std::map<std::string, double> rule_avg_heuristic;
    std::vector<std::string> error_rate_ordering;           // ascending
    std::vector<std::string> heuristic_ordering;            // ascending
    long total_exclusions = 0;
};

MetricReport build_report(const ScoreTensor& tensor, const MetricReportOptions& options = {});

// Writes report.csv, figures/*.csv and summary.json under `directory`.
void write_report(const MetricReport& report, const std::string& directory);

}  // namespace scorebench
