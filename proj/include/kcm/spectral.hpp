#pragma once

#include <Eigen/Dense>

#include "kcm/kernel.hpp"

namespace kcm::spectral {

// Eigensystem of a symmetric PSD matrix, eigenvalues descending and floored
// at zero. rank_kept < n marks a truncated (low-rank) view.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // sigma_i^2, length rank_kept
  Eigen::MatrixXd eigenvectors;  // n x rank_kept, column-orthonormal
  Eigen::Index n = 0;
  Eigen::Index rank_kept = 0;
  double floor_threshold = 0.0;  // 1e-12 * sigma_1^2

  // Leading count of eigenvalues strictly above the floor; directions past
  // this are numerically zero and unusable for Nystrom evaluation.
  Eigen::Index positive_count() const;
};

// d_hat_i = n^{-1/2} eps' u_i and S_hat_i^2 = population-style variance of
// sqrt(n) (eps ⊙ u_i), for i = 1..J.
struct DirectionalEstimates {
  Eigen::VectorXd d_hat;
  Eigen::VectorXd s2_hat;
  int J = 0;
};

SpectralDecomposition eigendecompose(const kernel::KernelMatrix& K);
SpectralDecomposition eigendecompose_sym(const Eigen::MatrixXd& S,
                                         double gamma_hint = 0.0);

// Leading-J view; eigenpairs are preserved bit-identically.
SpectralDecomposition truncate(const SpectralDecomposition& dec, Eigen::Index J);

DirectionalEstimates directional_components(const SpectralDecomposition& dec,
                                            const Eigen::VectorXd& eps,
                                            Eigen::Index J);

// Estimated eigenfunction i evaluated at m new points:
// (sqrt(n) / sigma_i^2) K_cross u_i, with K_cross(a, j) = k(x*_a, x_j).
// i is zero-based.
Eigen::VectorXd nystrom_eigenfunction(const SpectralDecomposition& dec,
                                      const Eigen::MatrixXd& K_cross,
                                      Eigen::Index i);

}  // namespace kcm::spectral
