#include "kcm/weights.hpp"

#include <cmath>

#include "kcm/error.hpp"

namespace kcm::weights {

WeightClass WeightScheme::cls() const {
  return (kind == WeightKind::Harmonic || kind == WeightKind::Equal)
             ? WeightClass::Divergent
             : WeightClass::Convergent;
}

std::string WeightScheme::token() const {
  switch (kind) {
    case WeightKind::EigenvalueScaled: return "eigen";
    case WeightKind::Basel: return "basel";
    case WeightKind::Harmonic: return "harmonic";
    case WeightKind::Equal: return "equal";
    case WeightKind::PolynomialDecay: return "poly:" + std::to_string(param);
    case WeightKind::Geometric: return "geom:" + std::to_string(param);
    case WeightKind::ExponentialDecay: return "exp:" + std::to_string(param);
  }
  return "?";
}

WeightScheme make_scheme(WeightKind kind, double param) {
  switch (kind) {
    case WeightKind::PolynomialDecay:
      if (!(param > 1.0)) {
        throw_usage("polynomial-decay weights require p > 1");
      }
      break;
    case WeightKind::Geometric:
      if (!(param > 0.0 && param < 1.0)) {
        throw_usage("geometric weights require 0 < r < 1");
      }
      break;
    case WeightKind::ExponentialDecay:
      if (!(param > 0.0)) {
        throw_usage("exponential-decay weights require beta > 0");
      }
      break;
    default:
      param = 0.0;
      break;
  }
  return WeightScheme{kind, param};
}

WeightScheme WeightScheme::parse(const std::string& token) {
  if (token == "eigen") return make_scheme(WeightKind::EigenvalueScaled);
  if (token == "basel") return make_scheme(WeightKind::Basel);
  if (token == "harmonic") return make_scheme(WeightKind::Harmonic);
  if (token == "equal") return make_scheme(WeightKind::Equal);
  const auto colon = token.find(':');
  if (colon != std::string::npos) {
    const std::string head = token.substr(0, colon);
    double value = 0.0;
    try {
      value = std::stod(token.substr(colon + 1));
    } catch (const std::exception&) {
      throw_usage("weight scheme '" + token + "': bad numeric parameter");
    }
    if (head == "poly") return make_scheme(WeightKind::PolynomialDecay, value);
    if (head == "geom") return make_scheme(WeightKind::Geometric, value);
    if (head == "exp") return make_scheme(WeightKind::ExponentialDecay, value);
  }
  throw_usage("unknown weight scheme '" + token +
              "' (expected eigen|basel|harmonic|equal|poly:<p>|geom:<r>|exp:<beta>)");
}

Eigen::VectorXd generate_weights(const WeightScheme& scheme, Eigen::Index J,
                                 const spectral::SpectralDecomposition* dec) {
  if (J < 1) {
    throw_usage("generate_weights: J must be >= 1");
  }
  if (scheme.kind == WeightKind::EigenvalueScaled) {
    if (dec == nullptr) {
      throw_usage("generate_weights: eigenvalue-scaled weights need a "
                  "spectral decomposition");
    }
    if (J > dec->rank_kept) {
      throw_usage("generate_weights: J exceeds decomposition rank");
    }
    return dec->eigenvalues.head(J) / static_cast<double>(dec->n);
  }
  Eigen::VectorXd w(J);
  for (Eigen::Index i = 1; i <= J; ++i) {
    const double x = static_cast<double>(i);
    double v = 0.0;
    switch (scheme.kind) {
      case WeightKind::Basel: v = 1.0 / (x * x); break;
      case WeightKind::PolynomialDecay: v = std::pow(x, -scheme.param); break;
      case WeightKind::Geometric: v = std::pow(scheme.param, x); break;
      case WeightKind::ExponentialDecay: v = std::exp(-scheme.param * x); break;
      case WeightKind::Harmonic: v = 1.0 / x; break;
      case WeightKind::Equal: v = 1.0; break;
      case WeightKind::EigenvalueScaled: break;  // handled above
    }
    w[i - 1] = v;
  }
  return w;
}

}  // namespace kcm::weights
