#include "kcm/regression.hpp"

#include <string>

#include "kcm/error.hpp"

namespace kcm::regression {

Eigen::VectorXd ProjectionMatrix::apply(const Eigen::VectorXd& v) const {
  if (v.size() != values.rows()) {
    throw_usage("ProjectionMatrix::apply: length mismatch");
  }
  return v - basis * (basis.transpose() * v);
}

LinearModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index q = X.cols();
  if (y.size() != n) {
    throw_usage("fit_ols: X has " + std::to_string(n) + " rows but y has " +
                std::to_string(y.size()));
  }
  if (n <= q + 1) {
    throw_data("fit_ols: need n > q + 1 (n = " + std::to_string(n) +
               ", q = " + std::to_string(q) + ")");
  }
  LinearModelFit fit;
  fit.design.resize(n, q + 1);
  fit.design.col(0) = Eigen::VectorXd::Ones(n);
  fit.design.rightCols(q) = X;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.design);
  if (qr.rank() < q + 1) {
    throw_data("fit_ols: design matrix is rank deficient (rank " +
               std::to_string(qr.rank()) + " < " + std::to_string(q + 1) +
               "); check for collinear covariates");
  }
  fit.theta_hat = qr.solve(y);
  fit.residuals = y - fit.design * fit.theta_hat;
  return fit;
}

Eigen::MatrixXd score_matrix(const LinearModelFit& fit) {
  return -fit.design;
}

ProjectionMatrix projection_matrix(const Eigen::MatrixXd& G) {
  const Eigen::Index n = G.rows();
  const Eigen::Index d = G.cols();
  if (d < 1 || d >= n) {
    throw_usage("projection_matrix: need 1 <= d < n (d = " +
                std::to_string(d) + ", n = " + std::to_string(n) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
  if (qr.rank() < d) {
    throw_data("projection_matrix: G'G is singular (score rank " +
               std::to_string(qr.rank()) + " < " + std::to_string(d) +
               "); scores are collinear");
  }
  ProjectionMatrix P;
  P.score_rank = static_cast<int>(d);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  // Column pivoting reorders columns of G but spans the same space.
  P.basis = std::move(Q);
  P.values = Eigen::MatrixXd::Identity(n, n) - P.basis * P.basis.transpose();
  P.values = 0.5 * (P.values + P.values.transpose()).eval();
  return P;
}

Eigen::VectorXd project_residuals(const ProjectionMatrix& P,
                                  const Eigen::VectorXd& eps) {
  if (eps.size() != P.size()) {
    throw_usage("project_residuals: length mismatch (" +
                std::to_string(eps.size()) + " vs " +
                std::to_string(P.size()) + ")");
  }
  return P.apply(eps);
}

Eigen::MatrixXd project_kernel(const ProjectionMatrix& P,
                               const Eigen::MatrixXd& K) {
  if (K.rows() != P.size() || K.cols() != P.size()) {
    throw_usage("project_kernel: size mismatch");
  }
  // (I - QQ')K(I - QQ') expanded to avoid two dense n^3 products with Pi.
  const Eigen::MatrixXd QtK = P.basis.transpose() * K;           // d x n
  Eigen::MatrixXd S = K - P.basis * QtK;                          // Pi K
  const Eigen::MatrixXd SQ = S * P.basis;                         // n x d
  S.noalias() -= SQ * P.basis.transpose();                        // Pi K Pi
  return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd project_kernel(const ProjectionMatrix& P,
                               const kernel::KernelMatrix& K) {
  return project_kernel(P, K.values);
}

}  // namespace kcm::regression
