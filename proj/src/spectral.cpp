#include "kcm/spectral.hpp"

#include <cmath>
#include <string>

#include "kcm/error.hpp"

namespace kcm::spectral {

Eigen::Index SpectralDecomposition::positive_count() const {
  Eigen::Index c = 0;
  while (c < rank_kept && eigenvalues[c] > floor_threshold) ++c;
  return c;
}

namespace {

// Deterministic eigenvector orientation: first entry of non-negligible
// magnitude is made positive.
void fix_signs(Eigen::MatrixXd& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    const double scale = U.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      if (std::abs(U(i, j)) > 1e-12 * scale) {
        if (U(i, j) < 0.0) U.col(j) = -U.col(j);
        break;
      }
    }
  }
}

}  // namespace

SpectralDecomposition eigendecompose_sym(const Eigen::MatrixXd& S,
                                         double gamma_hint) {
  if (S.rows() != S.cols()) {
    throw_usage("eigendecompose: matrix not square");
  }
  const Eigen::Index n = S.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) {
    std::string msg = "eigendecompose: solver failed to converge (n = " +
                      std::to_string(n) + ")";
    if (gamma_hint > 0.0) msg += ", gamma = " + std::to_string(gamma_hint);
    throw_numeric(msg);
  }
  SpectralDecomposition dec;
  dec.n = n;
  dec.rank_kept = n;
  dec.eigenvalues = solver.eigenvalues().reverse();
  dec.eigenvectors = solver.eigenvectors().rowwise().reverse();
  // Negative eigenvalues are numerical noise for PSD inputs.
  dec.eigenvalues = dec.eigenvalues.cwiseMax(0.0);
  dec.floor_threshold =
      dec.eigenvalues.size() > 0 ? 1e-12 * dec.eigenvalues[0] : 0.0;
  fix_signs(dec.eigenvectors);
  return dec;
}

SpectralDecomposition eigendecompose(const kernel::KernelMatrix& K) {
  return eigendecompose_sym(K.values, K.spec.gamma);
}

SpectralDecomposition truncate(const SpectralDecomposition& dec,
                               Eigen::Index J) {
  if (J < 1 || J > dec.rank_kept) {
    throw_usage("truncate: J = " + std::to_string(J) +
                " out of range [1, " + std::to_string(dec.rank_kept) + "]");
  }
  SpectralDecomposition out;
  out.n = dec.n;
  out.rank_kept = J;
  out.eigenvalues = dec.eigenvalues.head(J);
  out.eigenvectors = dec.eigenvectors.leftCols(J);
  out.floor_threshold = dec.floor_threshold;
  return out;
}

DirectionalEstimates directional_components(const SpectralDecomposition& dec,
                                            const Eigen::VectorXd& eps,
                                            Eigen::Index J) {
  if (eps.size() != dec.n) {
    throw_usage("directional_components: residual length " +
                std::to_string(eps.size()) + " != n = " +
                std::to_string(dec.n));
  }
  if (J < 1 || J > dec.rank_kept) {
    throw_usage("directional_components: J out of range");
  }
  const double n = static_cast<double>(dec.n);
  DirectionalEstimates est;
  est.J = static_cast<int>(J);
  est.d_hat = dec.eigenvectors.leftCols(J).transpose() * eps / std::sqrt(n);
  // Var_n of sqrt(n)(eps ⊙ u_i) collapses to sum_j eps_j^2 u_ij^2 - d_i^2.
  const Eigen::VectorXd eps2 = eps.array().square();
  est.s2_hat =
      (dec.eigenvectors.leftCols(J).array().square().matrix().transpose() *
       eps2) -
      est.d_hat.array().square().matrix();
  est.s2_hat = est.s2_hat.cwiseMax(0.0);
  return est;
}

Eigen::VectorXd nystrom_eigenfunction(const SpectralDecomposition& dec,
                                      const Eigen::MatrixXd& K_cross,
                                      Eigen::Index i) {
  if (i < 0 || i >= dec.rank_kept) {
    throw_usage("nystrom_eigenfunction: index out of range");
  }
  if (K_cross.cols() != dec.n) {
    throw_usage("nystrom_eigenfunction: K_cross has " +
                std::to_string(K_cross.cols()) + " columns, expected " +
                std::to_string(dec.n));
  }
  const double sigma2 = dec.eigenvalues[i];
  if (sigma2 <= dec.floor_threshold) {
    throw_numeric("nystrom_eigenfunction: unstable eigendirection (sigma^2 at "
                  "or below floor)");
  }
  return std::sqrt(static_cast<double>(dec.n)) / sigma2 *
         (K_cross * dec.eigenvectors.col(i));
}

}  // namespace kcm::spectral
