#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "kcm/kernel.hpp"
#include "kcm/regression.hpp"
#include "kcm/spectral.hpp"

namespace kcm::selection {

enum class SelectionMethod { NonAsymptotic, Asymptotic };

struct SelectionResult {
  kernel::KernelSpec chosen;
  std::vector<std::pair<double, double>> criterion_values;  // (gamma, score)
  SelectionMethod method = SelectionMethod::NonAsymptotic;
};

// Squared signal-to-noise statistic V^2 for the truncated quadratic form,
// or -inf when the studentization degenerates (bandwidth excluded).
double snr_nonasymptotic(const spectral::SpectralDecomposition& dec,
                         const Eigen::VectorXd& eps_train, Eigen::Index J);

// Asymptotic criterion (1/n^2) eps' K eps / (2 sigma_H1 + lambda); the
// truncated variant passes the reconstructed low-rank matrix as K.
double snr_asymptotic(const Eigen::MatrixXd& K, const Eigen::VectorXd& eps_train,
                      double lambda);

struct SelectionOptions {
  SelectionMethod method = SelectionMethod::NonAsymptotic;
  double lambda = 0.15;
  double tau = 0.11;
  int N_total = 0;        // full sample size, sets J = floor(tau N)
  bool truncate = true;   // false: J = n_train (the *_all variants)
  int J_force = 0;        // when > 0, use J = min(J_force, n_train) instead
};

// Grid search on the training split; criteria evaluated on the projected
// kernel Pi K Pi. Ties and duplicates resolve toward the smaller bandwidth.
SelectionResult select_kernel(const Eigen::MatrixXd& X_train,
                              const Eigen::VectorXd& eps_train,
                              const regression::ProjectionMatrix& P_train,
                              const std::vector<kernel::KernelSpec>& grid,
                              const SelectionOptions& opts);

}  // namespace kcm::selection
