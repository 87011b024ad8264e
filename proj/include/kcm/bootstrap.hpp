#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kcm/regression.hpp"
#include "kcm/rng.hpp"
#include "kcm/spectral.hpp"
#include "kcm/teststats.hpp"

namespace kcm::bootstrap {

// Mammen two-point multipliers: 0.5(1 - sqrt 5) with probability
// b = (1 + sqrt 5) / (2 sqrt 5), else 0.5(1 + sqrt 5). Zero mean, unit
// variance, exactly.
struct MultiplierDraw {
  Eigen::VectorXd values;
};

constexpr double kMammenLow = -0.61803398874989484820;   // 0.5 (1 - sqrt 5)
constexpr double kMammenHigh = 1.61803398874989484820;   // 0.5 (1 + sqrt 5)
constexpr double kMammenLowProb = 0.72360679774997896964; // (1+sqrt5)/(2 sqrt5)

MultiplierDraw draw_multipliers(Eigen::Index n, Rng& rng);

struct BootstrapDistribution {
  std::vector<double> draws;
  int B = 0;
  teststats::StatisticKind kind;
  int failures = 0;
};

// B multiplier-bootstrap draws of the statistic `kind`, holding the
// eigensystem, weights, and truncation level fixed. The residual input is
// projected once (Pi eps) and each replicate evaluates on Pi((Pi eps) ⊙ V),
// so draws depend on the fitted coefficients only through the projection.
// Replicate b's multipliers come from seed_hash(seed, "boot", b).
BootstrapDistribution bootstrap_distribution(
    const spectral::SpectralDecomposition& dec,
    const regression::ProjectionMatrix& P, const Eigen::VectorXd& eps,
    const teststats::StatisticKind& kind, const Eigen::VectorXd& weights,
    Eigen::Index J, int B, std::uint64_t seed);

// (1 + #{draws >= observed}) / (B + 1); strictly positive by construction.
double p_value(const BootstrapDistribution& dist, double observed);

// Empirical (1 - alpha) quantile with the "higher" order statistic, matching
// the p-value convention.
double critical_value(const BootstrapDistribution& dist, double alpha);

struct TestOutcome {
  teststats::StatisticKind kind;
  teststats::StatisticValue statistic;
  double p_value = 1.0;
  double critical_value = 0.0;
  bool reject = false;
  int B = 0;
  double alpha = 0.05;
  int bootstrap_failures = 0;
};

TestOutcome make_outcome(const teststats::StatisticKind& kind,
                         const teststats::StatisticValue& observed,
                         const BootstrapDistribution& dist, double alpha);

}  // namespace kcm::bootstrap
