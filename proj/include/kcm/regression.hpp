#pragma once

#include <Eigen/Dense>

#include "kcm/kernel.hpp"

namespace kcm::regression {

// OLS fit of y on [1, X]; theta_hat = (alpha, beta_1..beta_q).
struct LinearModelFit {
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd design;  // n x (q + 1), column of ones first
};

// Annihilator of the score matrix: Pi = I - G (G'G)^{-1} G'.
struct ProjectionMatrix {
  Eigen::MatrixXd values;  // dense n x n, symmetric idempotent
  Eigen::MatrixXd basis;   // n x d orthonormal basis of col(G)
  int score_rank = 0;

  Eigen::Index size() const { return values.rows(); }

  // Pi v without forming the dense product: v - Q (Q'v).
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

LinearModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Row i is the residual gradient at theta_hat; for the linear model this is
// -(1, x_i'), i.e. the negated design matrix.
Eigen::MatrixXd score_matrix(const LinearModelFit& fit);

ProjectionMatrix projection_matrix(const Eigen::MatrixXd& G);

Eigen::VectorXd project_residuals(const ProjectionMatrix& P,
                                  const Eigen::VectorXd& eps);

// Pi K Pi', symmetrized against roundoff.
Eigen::MatrixXd project_kernel(const ProjectionMatrix& P,
                               const Eigen::MatrixXd& K);
Eigen::MatrixXd project_kernel(const ProjectionMatrix& P,
                               const kernel::KernelMatrix& K);

}  // namespace kcm::regression
