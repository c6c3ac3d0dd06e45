#include "scorebench/linalg.hpp"

#include <cmath>

#include "scorebench/errors.hpp"

namespace scorebench {

Eigen::MatrixXd clip_correlation_psd(const Eigen::MatrixXd& m, double floor) {
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd ev = es.eigenvalues();
    bool needs_clip = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < floor) {
            ev(i) = floor;
            needs_clip = true;
        }
    }
    Eigen::MatrixXd out =
        needs_clip ? Eigen::MatrixXd(es.eigenvectors() * ev.asDiagonal() *
                                     es.eigenvectors().transpose())
                   : sym;
    Eigen::VectorXd diag = out.diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (diag(i) <= 0.0) fail(Err::SingularCovariance, "non-positive diagonal after clipping");
    Eigen::VectorXd inv_sqrt = diag.array().sqrt().inverse();
    out = inv_sqrt.asDiagonal() * out * inv_sqrt.asDiagonal();
    out.diagonal().setOnes();
    return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd safe_cholesky(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::MatrixXd clipped = clip_correlation_psd(m, 1e-10);
    // Preserve the original scale: clip_correlation_psd normalizes the
    // diagonal, so rescale back.
    Eigen::VectorXd scale = m.diagonal().array().max(1e-300).sqrt();
    clipped = scale.asDiagonal() * clipped * scale.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> retry(clipped);
    if (retry.info() == Eigen::Success) return retry.matrixL();
    fail(Err::CholeskyFailure, "matrix not positive definite after eigenvalue clipping");
}

Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& data) {
    Eigen::MatrixXd cov = column_covariance_ml(data);
    Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i)
        if (sd(i) <= 0.0) fail(Err::DegenerateColumn, "constant column in correlation input");
    Eigen::MatrixXd corr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
    corr.diagonal().setOnes();
    return 0.5 * (corr + corr.transpose());
}

Eigen::MatrixXd column_covariance_ml(const Eigen::MatrixXd& data) {
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(data.rows());
}

Eigen::MatrixXd equicorrelation(int d, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
    m.diagonal().setOnes();
    return m;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

}  // namespace scorebench
