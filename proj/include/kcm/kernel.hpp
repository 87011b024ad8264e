#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kcm::kernel {

enum class KernelFamily { Gaussian };

// Gaussian kernel k(x, y) = exp(-gamma * |x - y|^2).
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double gamma = 1.0;
};

KernelSpec make_gaussian(double gamma);

struct KernelMatrix {
  Eigen::MatrixXd values;  // symmetric, unit diagonal, entries in (0, 1]
  KernelSpec spec;

  Eigen::Index size() const { return values.rows(); }
};

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Pairwise kernel matrix over the rows of X (n x q, n >= 2).
KernelMatrix build_kernel_matrix(const KernelSpec& spec,
                                 const Eigen::MatrixXd& X);

// Cross-kernel block k(x*_a, x_b) between the rows of A (m x q) and B (n x q).
Eigen::MatrixXd build_cross_kernel(const KernelSpec& spec,
                                   const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B);

// gamma = 1 / median of the strict upper-triangle pairwise Euclidean
// distances; even counts take the lower middle order statistic.
double median_heuristic(const Eigen::MatrixXd& X);

// m candidate bandwidths, log-spaced over [gamma_med / 16, 16 * gamma_med];
// the median-heuristic value itself is always a grid point.
std::vector<KernelSpec> gamma_grid(const Eigen::MatrixXd& X_train, int m);

}  // namespace kcm::kernel
