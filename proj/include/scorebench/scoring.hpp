// Proper scoring rules for distribution forecasts.
//
// Every rule here is negatively oriented: lower is better, and the expected
// score under the true distribution is minimal. ES, VS and CRPS are
// nonnegative; the log score may take any real value, and the
// pseudo-spherical score is negated on return so the whole suite shares one
// orientation.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scorebench/dates.hpp"

namespace scorebench {

struct ForecastEnsemble {
    Eigen::MatrixXd draws;  // n_draws x d, all finite
    std::string model_id;
    Date date;
};

// --- Multivariate kernel scores over ensembles ------------------------------

// ES_beta(F, y) = E||Y - y||^beta - 1/2 E||Y - Y'||^beta, with the
// expectations replaced by ensemble averages: (1/N) sum_i ||x_i - y||^beta and
// (1/(2N^2)) sum_{i,j} ||x_i - x_j||^beta. Requires 0 < beta < 2 and N >= 2.
double energy_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& y, double beta);

// VS_p(F, y) = sum_{i,j} (|y_i - y_j|^p - E_F|Y_i - Y_j|^p)^2 with unit
// weights; the expectation is the ensemble mean. Requires p > 0, N >= 1.
double variogram_score(const Eigen::MatrixXd& draws, const Eigen::VectorXd& y, double p);

// Univariate CRPS in kernel form, E|X - y| - 1/2 E|X - X'|, evaluated exactly
// for the empirical distribution in O(N log N) via sorted order statistics.
double crps_ensemble(std::span<const double> draws, double y);

// --- Ensemble pre-computation for many observations -------------------------
// The draw-draw terms of ES and VS do not depend on the observation; these
// contexts hoist them so that scoring N realisations costs O(N * n_draws * d)
// for ES and O(N * d^2) for VS.

class EnergyScoreContext {
  public:
    EnergyScoreContext(const Eigen::MatrixXd& draws, double beta);
    double score(const Eigen::VectorXd& y) const;

  private:
    const Eigen::MatrixXd draws_;
    double beta_;
    double half_pair_term_;
};

class VariogramScoreContext {
  public:
    VariogramScoreContext(const Eigen::MatrixXd& draws, double p);
    double score(const Eigen::VectorXd& y) const;
    // Score from precomputed observation variograms |y_i - y_j|^p (upper
    // triangle, row-major i<j) as produced by observation_variogram().
    double score_from_variogram(std::span<const double> y_vario) const;
    static std::vector<double> observation_variogram(const Eigen::VectorXd& y, double p);

  private:
    Eigen::Index d_;
    double p_;
    std::vector<double> gamma_;  // ensemble mean |X_i - X_j|^p, upper triangle
};

// --- Weighted CRPS representations ------------------------------------------

enum class WeightEmphasis { Uniform, Centre, BothTails, RightTail, LeftTail };

WeightEmphasis weight_emphasis_from_name(const std::string& name);
const char* weight_emphasis_name(WeightEmphasis w);

// Quantile weights nu(alpha) and threshold weights u(z).
double quantile_weight(WeightEmphasis emphasis, double alpha);
double threshold_weight(WeightEmphasis emphasis, double z);

// Integral over (0,1) of 2*(1{y <= F^-1(a)} - a)*(F^-1(a) - y)*nu(a) by the
// midpoint rule on `grid` uniform nodes. inv_cdf must be non-decreasing.
double crps_quantile_weighted(const std::function<double(double)>& inv_cdf, double y,
                              WeightEmphasis weight, int grid = 4096);

// Integral of (F(z) - 1{y <= z})^2 * u(z) over [z_lo, z_hi] by the midpoint
// rule; the range must contain y.
double crps_threshold_weighted(const std::function<double(double)>& cdf, double y,
                               WeightEmphasis weight, double z_lo, double z_hi, int grid = 4096);

// Step quantile function of an ensemble (empirical inverse CDF).
std::function<double(double)> empirical_inverse_cdf(std::vector<double> draws);
std::function<double(double)> empirical_cdf(std::vector<double> draws);

// --- Density scores for the Gaussian case ------------------------------------

struct GaussianDensitySpec {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // symmetric positive definite
};

struct DensityScores {
    double log_score;       // -log f(y)
    double quadratic;       // ||f||_2^2 - 2 f(y)
    double pseudospherical; // -(f(y)/||f||_alpha)^{alpha-1}, negated for orientation
};

DensityScores density_scores(const GaussianDensitySpec& spec, const Eigen::VectorXd& y,
                             double alpha = 2.0);

}  // namespace scorebench
