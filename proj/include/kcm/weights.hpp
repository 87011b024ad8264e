#pragma once

#include <Eigen/Dense>
#include <string>

#include "kcm/spectral.hpp"

namespace kcm::weights {

enum class WeightKind {
  EigenvalueScaled,  // sigma_i^2 / n from a decomposition
  Basel,             // i^{-2}
  PolynomialDecay,   // i^{-p}, p > 1
  Geometric,         // r^i, 0 < r < 1
  ExponentialDecay,  // exp(-beta i), beta > 0
  Harmonic,          // i^{-1}   (divergent)
  Equal,             // 1        (divergent)
};

enum class WeightClass { Convergent, Divergent };

struct WeightScheme {
  WeightKind kind = WeightKind::EigenvalueScaled;
  double param = 0.0;  // p, r, or beta where applicable

  WeightClass cls() const;
  std::string token() const;

  // Accepts: eigen | basel | harmonic | equal | poly:<p> | geom:<r> | exp:<beta>
  static WeightScheme parse(const std::string& token);
};

WeightScheme make_scheme(WeightKind kind, double param = 0.0);

// Length-J positive non-increasing sequence; EigenvalueScaled requires dec
// and returns sigma_i^2 / n.
Eigen::VectorXd generate_weights(const WeightScheme& scheme, Eigen::Index J,
                                 const spectral::SpectralDecomposition* dec =
                                     nullptr);

}  // namespace kcm::weights
