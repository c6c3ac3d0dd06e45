#include "scorebench/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

namespace {

void check_ensemble(const Eigen::MatrixXd& draws, const Eigen::VectorXd& y, Eigen::Index min_n) {
    if (draws.rows() < min_n)
        fail(Err::DegenerateEnsemble,
             "ensemble needs at least " + std::to_string(min_n) + " draws");
    if (draws.cols() != y.size())
        fail(Err::LengthMismatch, "ensemble dimension " + std::to_string(draws.cols()) +
                                      " vs observation dimension " + std::to_string(y.size()));
    if (!draws.allFinite() || !y.allFinite())
        fail(Err::NonFiniteValue, "ensemble or observation contains non-finite entries");
}

// ||a - b||^beta for contiguous columns of a d x N matrix.
inline double pow_norm(const double* a, const double* b, Eigen::Index d, double beta) {
    double q = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        double diff = a[k] - b[k];
        q += diff * diff;
    }
    double n = std::sqrt(q);
    if (beta == 1.0) return n;
    return std::pow(n, beta);
}

inline double abs_pow(double v, double p) {
    double a = std::abs(v);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    if (p == 0.5) return std::sqrt(a);
    return std::pow(a, p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Energy score

EnergyScoreContext::EnergyScoreContext(const Eigen::MatrixXd& draws, double beta)
    : draws_(draws.transpose()), beta_(beta) {
    if (!(beta > 0.0 && beta < 2.0))
        fail(Err::BetaOutOfRange, "energy score needs beta in (0,2), got " + std::to_string(beta));
    if (draws.rows() < 2) fail(Err::DegenerateEnsemble, "energy score needs at least 2 draws");
    if (!draws.allFinite()) fail(Err::NonFiniteValue, "ensemble contains non-finite entries");

    const Eigen::Index n = draws_.cols();
    const Eigen::Index d = draws_.rows();
    // (1/(2N^2)) sum_{i,j} ||x_i - x_j||^beta; the diagonal vanishes and the
    // two triangles agree, so sum i<j once.
    KahanSum pair_sum;
    const double* base = draws_.data();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* xi = base + i * d;
        for (Eigen::Index j = i + 1; j < n; ++j)
            pair_sum.add(pow_norm(xi, base + j * d, d, beta_));
    }
    half_pair_term_ = pair_sum.value() / (static_cast<double>(n) * static_cast<double>(n));
}

double EnergyScoreContext::score(const Eigen::VectorXd& y) const {
    const Eigen::Index n = draws_.cols();
    const Eigen::Index d = draws_.rows();
    if (y.size() != d)
        fail(Err::LengthMismatch, "observation dimension mismatch in energy score");
    KahanSum first;
    const double* base = draws_.data();
    const double* yp = y.data();
    for (Eigen::Index i = 0; i < n; ++i) first.add(pow_norm(base + i * d, yp, d, beta_));
    return first.value() / static_cast<double>(n) - half_pair_term_;
}

double energy_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& y, double beta) {
    check_ensemble(draws, y, 2);
    return EnergyScoreContext(draws, beta).score(y);
}

// ---------------------------------------------------------------------------
// Variogram score

VariogramScoreContext::VariogramScoreContext(const Eigen::MatrixXd& draws, double p)
    : d_(draws.cols()), p_(p) {
    if (!(p > 0.0)) fail(Err::NonPositiveOrder, "variogram order must be positive");
    if (draws.rows() < 1) fail(Err::DegenerateEnsemble, "variogram score needs at least 1 draw");
    if (!draws.allFinite()) fail(Err::NonFiniteValue, "ensemble contains non-finite entries");

    const Eigen::Index n = draws.rows();
    gamma_.assign(static_cast<std::size_t>(d_ * (d_ - 1) / 2), 0.0);
    // Accumulate per pair over draws; draws is column-major so walk columns.
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < d_; ++i) {
        for (Eigen::Index j = i + 1; j < d_; ++j, ++idx) {
            const double* ci = draws.col(i).data();
            const double* cj = draws.col(j).data();
            KahanSum s;
            for (Eigen::Index r = 0; r < n; ++r) s.add(abs_pow(ci[r] - cj[r], p_));
            gamma_[idx] = s.value() / static_cast<double>(n);
        }
    }
}

std::vector<double> VariogramScoreContext::observation_variogram(const Eigen::VectorXd& y,
                                                                 double p) {
    const Eigen::Index d = y.size();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) out.push_back(abs_pow(y(i) - y(j), p));
    return out;
}

double VariogramScoreContext::score_from_variogram(std::span<const double> y_vario) const {
    if (y_vario.size() != gamma_.size())
        fail(Err::LengthMismatch, "observation variogram size mismatch");
    // Off-diagonal pairs appear twice in the double sum over (i, j).
    double total = 0.0;
    for (std::size_t k = 0; k < gamma_.size(); ++k) {
        double dev = y_vario[k] - gamma_[k];
        total += dev * dev;
    }
    return 2.0 * total;
}

double VariogramScoreContext::score(const Eigen::VectorXd& y) const {
    if (y.size() != d_) fail(Err::LengthMismatch, "observation dimension mismatch in variogram");
    return score_from_variogram(observation_variogram(y, p_));
}

double variogram_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& y, double p) {
    check_ensemble(draws, y, 1);
    return VariogramScoreContext(draws, p).score(y);
}

// ---------------------------------------------------------------------------
// CRPS, kernel form

double crps_ensemble(std::span<const double> draws, double y) {
    if (draws.size() < 2) fail(Err::DegenerateEnsemble, "crps_ensemble needs at least 2 draws");
    for (double v : draws)
        if (!std::isfinite(v)) fail(Err::NonFiniteValue, "crps_ensemble: non-finite draw");
    const std::size_t n = draws.size();
    const double dn = static_cast<double>(n);

    KahanSum first;
    for (double v : draws) first.add(std::abs(v - y));

    // sum_{i<j} (x_(j) - x_(i)) = sum_k x_(k) * (2k - n + 1) over sorted draws,
    // so the O(N^2) double sum collapses to a sort.
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    KahanSum pair_sum;
    for (std::size_t k = 0; k < n; ++k)
        pair_sum.add(sorted[k] * (2.0 * static_cast<double>(k) - dn + 1.0));

    return first.value() / dn - pair_sum.value() / (dn * dn);
}

// ---------------------------------------------------------------------------
// Weight functions (quantile and threshold emphases)

WeightEmphasis weight_emphasis_from_name(const std::string& name) {
    if (name == "uniform") return WeightEmphasis::Uniform;
    if (name == "centre") return WeightEmphasis::Centre;
    if (name == "both-tails") return WeightEmphasis::BothTails;
    if (name == "right-tail") return WeightEmphasis::RightTail;
    if (name == "left-tail") return WeightEmphasis::LeftTail;
    fail(Err::ConfigError, "unknown weight emphasis '" + name + "'");
}

const char* weight_emphasis_name(WeightEmphasis w) {
    switch (w) {
        case WeightEmphasis::Uniform: return "uniform";
        case WeightEmphasis::Centre: return "centre";
        case WeightEmphasis::BothTails: return "both-tails";
        case WeightEmphasis::RightTail: return "right-tail";
        case WeightEmphasis::LeftTail: return "left-tail";
    }
    return "unknown";
}

double quantile_weight(WeightEmphasis emphasis, double alpha) {
    switch (emphasis) {
        case WeightEmphasis::Uniform: return 1.0;
        case WeightEmphasis::Centre: return alpha * (1.0 - alpha);
        case WeightEmphasis::BothTails: {
            double t = 2.0 * alpha - 1.0;
            return t * t;
        }
        case WeightEmphasis::RightTail: return alpha * alpha;
        case WeightEmphasis::LeftTail: {
            double t = 1.0 - alpha;
            return t * t;
        }
    }
    return 1.0;
}

double threshold_weight(WeightEmphasis emphasis, double z) {
    switch (emphasis) {
        case WeightEmphasis::Uniform: return 1.0;
        case WeightEmphasis::Centre: return norm_pdf(z);
        case WeightEmphasis::BothTails: return 1.0 - norm_pdf(z) / norm_pdf(0.0);
        case WeightEmphasis::RightTail: return norm_cdf(z);
        case WeightEmphasis::LeftTail: return 1.0 - norm_cdf(z);
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Weighted CRPS representations

double crps_quantile_weighted(const std::function<double(double)>& inv_cdf, double y,
                              WeightEmphasis weight, int grid) {
    if (grid < 16) fail(Err::ConfigError, "crps_quantile_weighted: grid must be >= 16");
    KahanSum acc;
    double prev_q = -std::numeric_limits<double>::infinity();
    const double h = 1.0 / static_cast<double>(grid);
    for (int k = 0; k < grid; ++k) {
        double alpha = (static_cast<double>(k) + 0.5) * h;
        double q = inv_cdf(alpha);
        if (!std::isfinite(q))
            fail(Err::NonFiniteValue, "quantile function returned a non-finite value");
        if (q < prev_q - 1e-9 * (1.0 + std::abs(q)))
            fail(Err::NonMonotoneQuantileFunction,
                 "quantile function decreases at alpha=" + std::to_string(alpha));
        prev_q = q;
        double indicator = y <= q ? 1.0 : 0.0;
        double qs = 2.0 * (indicator - alpha) * (q - y);
        acc.add(qs * quantile_weight(weight, alpha));
    }
    return acc.value() * h;
}

double crps_threshold_weighted(const std::function<double(double)>& cdf, double y,
                               WeightEmphasis weight, double z_lo, double z_hi, int grid) {
    if (grid < 16) fail(Err::ConfigError, "crps_threshold_weighted: grid must be >= 16");
    if (!(z_lo < z_hi)) fail(Err::ConfigError, "crps_threshold_weighted: empty range");
    if (y < z_lo || y > z_hi)
        fail(Err::RangeExcludesObservation, "threshold range [" + std::to_string(z_lo) + ", " +
                                                std::to_string(z_hi) + "] excludes y=" +
                                                std::to_string(y));
    KahanSum acc;
    const double h = (z_hi - z_lo) / static_cast<double>(grid);
    for (int k = 0; k < grid; ++k) {
        double z = z_lo + (static_cast<double>(k) + 0.5) * h;
        double f = std::clamp(cdf(z), 0.0, 1.0);
        double indicator = y <= z ? 1.0 : 0.0;
        double brier = (f - indicator) * (f - indicator);
        acc.add(brier * threshold_weight(weight, z));
    }
    return acc.value() * h;
}

std::function<double(double)> empirical_inverse_cdf(std::vector<double> draws) {
    if (draws.empty()) fail(Err::DegenerateEnsemble, "empirical_inverse_cdf: empty ensemble");
    std::sort(draws.begin(), draws.end());
    return [sorted = std::move(draws)](double u) {
        const std::size_t n = sorted.size();
        if (u <= 0.0) return sorted.front();
        // inf{x : F(x) >= u} = x_(ceil(u*n)) in 1-based order statistics.
        std::size_t k = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n)));
        if (k < 1) k = 1;
        if (k > n) k = n;
        return sorted[k - 1];
    };
}

std::function<double(double)> empirical_cdf(std::vector<double> draws) {
    if (draws.empty()) fail(Err::DegenerateEnsemble, "empirical_cdf: empty ensemble");
    std::sort(draws.begin(), draws.end());
    return [sorted = std::move(draws)](double z) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), z);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    };
}

// ---------------------------------------------------------------------------
// Gaussian density scores

DensityScores density_scores(const GaussianDensitySpec& spec, const Eigen::VectorXd& y,
                             double alpha) {
    const Eigen::Index d = spec.mean.size();
    if (spec.covariance.rows() != d || spec.covariance.cols() != d || y.size() != d)
        fail(Err::LengthMismatch, "density_scores: inconsistent dimensions");
    if (!(alpha > 1.0)) fail(Err::ConfigError, "density_scores: alpha must exceed 1");

    Eigen::LLT<Eigen::MatrixXd> llt(spec.covariance);
    if (llt.info() != Eigen::Success)
        fail(Err::SingularCovariance, "covariance is not positive definite");
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));

    Eigen::VectorXd centered = y - spec.mean;
    double quad_form = centered.dot(llt.solve(centered));
    const double log_2pi = std::log(2.0 * M_PI);
    double log_f = -0.5 * (d * log_2pi + log_det + quad_form);

    // ||f||_2^2 = (4 pi)^{-d/2} |Sigma|^{-1/2}
    double log_l2_sq = -0.5 * d * std::log(4.0 * M_PI) - 0.5 * log_det;
    // ||f||_alpha = (int f^alpha)^{1/alpha},
    // int f^alpha = (2 pi)^{-d(alpha-1)/2} |Sigma|^{-(alpha-1)/2} alpha^{-d/2}
    double log_int_f_alpha =
        -0.5 * d * (alpha - 1.0) * log_2pi - 0.5 * (alpha - 1.0) * log_det -
        0.5 * d * std::log(alpha);
    double log_norm_alpha = log_int_f_alpha / alpha;

    DensityScores out;
    out.log_score = -log_f;
    out.quadratic = std::exp(log_l2_sq) - 2.0 * std::exp(log_f);
    out.pseudospherical = -std::exp((alpha - 1.0) * (log_f - log_norm_alpha));
    return out;
}

}  // namespace scorebench
