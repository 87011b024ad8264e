#include "kcm/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "kcm/error.hpp"

namespace kcm::kernel {

KernelSpec make_gaussian(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw_usage("kernel bandwidth gamma must be a positive finite real");
  }
  return KernelSpec{KernelFamily::Gaussian, gamma};
}

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw_usage("eval_kernel: dimension mismatch (" +
                std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                ")");
  }
  return std::exp(-spec.gamma * (x - y).squaredNorm());
}

KernelMatrix build_kernel_matrix(const KernelSpec& spec,
                                 const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n < 2) {
    throw_data("build_kernel_matrix: need at least 2 rows, got " +
               std::to_string(n));
  }
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v =
          std::exp(-spec.gamma * (X.row(i) - X.row(j)).squaredNorm());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return KernelMatrix{std::move(K), spec};
}

Eigen::MatrixXd build_cross_kernel(const KernelSpec& spec,
                                   const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) {
    throw_usage("build_cross_kernel: dimension mismatch");
  }
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      K(i, j) = std::exp(-spec.gamma * (A.row(i) - B.row(j)).squaredNorm());
    }
  }
  return K;
}

double median_heuristic(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n < 2) {
    throw_data("median_heuristic: need at least 2 rows");
  }
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dists.push_back((X.row(i) - X.row(j)).norm());
    }
  }
  // Lower middle order statistic for even counts.
  const std::size_t idx = (dists.size() - 1) / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(idx),
                   dists.end());
  const double med = dists[idx];
  if (!(med > 0.0)) {
    throw_data("median_heuristic: median pairwise distance is zero "
               "(all rows identical?)");
  }
  return 1.0 / med;
}

std::vector<KernelSpec> gamma_grid(const Eigen::MatrixXd& X_train, int m) {
  if (m < 1) {
    throw_usage("gamma_grid: grid size must be >= 1");
  }
  const double gamma_med = median_heuristic(X_train);
  if (m == 1) {
    return {make_gaussian(gamma_med)};
  }
  const double log16 = std::log(16.0);
  std::vector<double> gammas(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double t = -1.0 + 2.0 * k / (m - 1);
    gammas[static_cast<std::size_t>(k)] = gamma_med * std::exp(t * log16);
  }
  // Guarantee the heuristic value is on the grid (exactly, for odd m the
  // center point already is; for even m replace the closest point).
  auto closest = std::min_element(
      gammas.begin(), gammas.end(), [&](double a, double b) {
        return std::abs(std::log(a / gamma_med)) <
               std::abs(std::log(b / gamma_med));
      });
  *closest = gamma_med;
  std::sort(gammas.begin(), gammas.end());
  std::vector<KernelSpec> grid;
  grid.reserve(gammas.size());
  for (double g : gammas) grid.push_back(make_gaussian(g));
  return grid;
}

}  // namespace kcm::kernel
