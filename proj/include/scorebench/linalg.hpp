// Small dense linear-algebra helpers on top of Eigen, shared by the copula
// and GARCH code.
#pragma once

#include <Eigen/Dense>

namespace scorebench {

// Symmetrizes, clips eigenvalues at `floor`, and rescales to unit diagonal.
// Input must be square with strictly positive diagonal after clipping.
Eigen::MatrixXd clip_correlation_psd(const Eigen::MatrixXd& m, double floor = 0.0);

// Lower Cholesky factor; if the matrix is not positive definite, retries once
// after clipping eigenvalues at 1e-10. Throws Err::CholeskyFailure if the
// retry also fails.
Eigen::MatrixXd safe_cholesky(const Eigen::MatrixXd& m);

// Sample Pearson correlation matrix of the columns of a T x d data matrix.
Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& data);

// Sample covariance (1/T divisor) of the columns.
Eigen::MatrixXd column_covariance_ml(const Eigen::MatrixXd& data);

// Equicorrelation matrix with off-diagonal rho.
Eigen::MatrixXd equicorrelation(int d, double rho);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace scorebench
