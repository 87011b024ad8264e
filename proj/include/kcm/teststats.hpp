#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "kcm/kernel.hpp"
#include "kcm/regression.hpp"
#include "kcm/spectral.hpp"
#include "kcm/weights.hpp"

namespace kcm::teststats {

enum class StatFamily { Basic, Generic, Divergent, Gp, Icm };

// A runnable statistic variant. Basic/Generic/Divergent run on the testing
// split after kernel selection; Gp/Icm are the fixed-kernel full-sample
// benchmarks. `truncate` distinguishes gp:trc/icm:trc from gp/icm and
// basic:all (full spectrum) from basic.
struct StatisticKind {
  StatFamily family = StatFamily::Basic;
  std::optional<weights::WeightScheme> scheme;  // Generic / Divergent only
  bool truncate = true;

  std::string token() const;

  // basic | basic:all | generic:<scheme> | divergent:<scheme> |
  // gp | gp:trc | icm | icm:trc
  static StatisticKind parse(const std::string& token);

  bool uses_selection() const {
    return family == StatFamily::Basic || family == StatFamily::Generic ||
           family == StatFamily::Divergent;
  }
};

struct DirectionDiagnostic {
  double weight = 0.0;  // sigma_i^2 (or sigma_i^2 / n) or omega_i
  double d_hat = 0.0;
  double s2_hat = 0.0;
};

struct StatisticValue {
  double value = 0.0;
  int J_used = 0;
  double gamma_used = 0.0;
  std::vector<DirectionDiagnostic> diagnostics;
};

// n' T_basic = sum_{i<=J} (sigma_i^2 / n') (u_i' eps)^2 over the projected
// testing kernel's eigensystem.
StatisticValue stat_basic(const spectral::SpectralDecomposition& dec,
                          const Eigen::VectorXd& eps_proj, Eigen::Index J);

// n' T_generic = sum_{i<=J} omega_i (u_i' eps)^2.
StatisticValue stat_generic(const spectral::SpectralDecomposition& dec,
                            const Eigen::VectorXd& eps_proj,
                            const Eigen::VectorXd& weights, Eigen::Index J);

// Studentized divergent-weight statistic.
StatisticValue stat_divergent(const spectral::SpectralDecomposition& dec,
                              const Eigen::VectorXd& eps_proj,
                              const Eigen::VectorXd& weights, Eigen::Index J);

// m T_p = (1/m) (Pi eps)' K (Pi eps), no truncation. stat_gp expects the
// median-heuristic bandwidth, stat_icm pins gamma = 0.5.
StatisticValue stat_gp(const kernel::KernelMatrix& K,
                       const regression::ProjectionMatrix& P,
                       const Eigen::VectorXd& eps);
StatisticValue stat_icm(const kernel::KernelMatrix& K,
                        const regression::ProjectionMatrix& P,
                        const Eigen::VectorXd& eps);

}  // namespace kcm::teststats
