#include "kcm/teststats.hpp"

#include <cmath>

#include "kcm/error.hpp"

namespace kcm::teststats {

std::string StatisticKind::token() const {
  switch (family) {
    case StatFamily::Basic: return truncate ? "basic" : "basic:all";
    case StatFamily::Gp: return truncate ? "gp:trc" : "gp";
    case StatFamily::Icm: return truncate ? "icm:trc" : "icm";
    case StatFamily::Generic: return "generic:" + scheme->token();
    case StatFamily::Divergent: return "divergent:" + scheme->token();
  }
  return "?";
}

StatisticKind StatisticKind::parse(const std::string& token) {
  StatisticKind kind;
  if (token == "basic") {
    kind.family = StatFamily::Basic;
    return kind;
  }
  if (token == "basic:all") {
    kind.family = StatFamily::Basic;
    kind.truncate = false;
    return kind;
  }
  if (token == "gp" || token == "gp:trc") {
    kind.family = StatFamily::Gp;
    kind.truncate = (token == "gp:trc");
    return kind;
  }
  if (token == "icm" || token == "icm:trc") {
    kind.family = StatFamily::Icm;
    kind.truncate = (token == "icm:trc");
    return kind;
  }
  const auto colon = token.find(':');
  if (colon != std::string::npos) {
    const std::string head = token.substr(0, colon);
    const std::string rest = token.substr(colon + 1);
    if (head == "generic" || head == "divergent") {
      kind.scheme = weights::WeightScheme::parse(rest);
      if (head == "generic") {
        kind.family = StatFamily::Generic;
        if (kind.scheme->cls() != weights::WeightClass::Convergent) {
          throw_usage("statistic 'generic' requires a convergent weight "
                      "scheme; use divergent:" + rest);
        }
      } else {
        kind.family = StatFamily::Divergent;
        if (kind.scheme->cls() != weights::WeightClass::Divergent) {
          throw_usage("statistic 'divergent' accepts only harmonic or equal "
                      "weights");
        }
      }
      return kind;
    }
  }
  throw_usage("unknown statistic '" + token +
              "' (expected basic|basic:all|generic:<scheme>|divergent:<scheme>"
              "|gp|gp:trc|icm|icm:trc)");
}

namespace {

void check_stat_inputs(const spectral::SpectralDecomposition& dec,
                       const Eigen::VectorXd& eps, Eigen::Index J) {
  if (eps.size() != dec.n) {
    throw_usage("test statistic: residual length mismatch");
  }
  if (J < 1 || J > dec.rank_kept) {
    throw_usage("test statistic: J = " + std::to_string(J) +
                " out of range [1, " + std::to_string(dec.rank_kept) + "]");
  }
}

std::vector<DirectionDiagnostic> make_diagnostics(
    const Eigen::VectorXd& weights, const spectral::DirectionalEstimates& est) {
  std::vector<DirectionDiagnostic> table(static_cast<std::size_t>(est.J));
  for (int i = 0; i < est.J; ++i) {
    table[static_cast<std::size_t>(i)] = {weights[i], est.d_hat[i],
                                          est.s2_hat[i]};
  }
  return table;
}

void check_weights(const Eigen::VectorXd& w, Eigen::Index J) {
  if (w.size() < J) {
    throw_usage("test statistic: weight sequence shorter than J");
  }
  for (Eigen::Index i = 0; i < J; ++i) {
    if (!(w[i] > 0.0)) {
      throw_usage("test statistic: weights must be positive");
    }
    if (i > 0 && w[i] > w[i - 1] * (1.0 + 1e-12)) {
      throw_usage("test statistic: weights must be non-increasing");
    }
  }
}

}  // namespace

StatisticValue stat_basic(const spectral::SpectralDecomposition& dec,
                          const Eigen::VectorXd& eps_proj, Eigen::Index J) {
  check_stat_inputs(dec, eps_proj, J);
  const double n = static_cast<double>(dec.n);
  const Eigen::VectorXd c = dec.eigenvectors.leftCols(J).transpose() * eps_proj;
  const Eigen::VectorXd w = dec.eigenvalues.head(J) / n;
  StatisticValue out;
  out.value = (w.array() * c.array().square()).sum();
  out.J_used = static_cast<int>(J);
  out.diagnostics =
      make_diagnostics(w, spectral::directional_components(dec, eps_proj, J));
  return out;
}

StatisticValue stat_generic(const spectral::SpectralDecomposition& dec,
                            const Eigen::VectorXd& eps_proj,
                            const Eigen::VectorXd& weights, Eigen::Index J) {
  check_stat_inputs(dec, eps_proj, J);
  check_weights(weights, J);
  const Eigen::VectorXd c = dec.eigenvectors.leftCols(J).transpose() * eps_proj;
  StatisticValue out;
  out.value = (weights.head(J).array() * c.array().square()).sum();
  out.J_used = static_cast<int>(J);
  out.diagnostics = make_diagnostics(
      weights, spectral::directional_components(dec, eps_proj, J));
  return out;
}

StatisticValue stat_divergent(const spectral::SpectralDecomposition& dec,
                              const Eigen::VectorXd& eps_proj,
                              const Eigen::VectorXd& weights, Eigen::Index J) {
  check_stat_inputs(dec, eps_proj, J);
  check_weights(weights, J);
  const auto est = spectral::directional_components(dec, eps_proj, J);
  const double n = static_cast<double>(dec.n);
  const auto w = weights.head(J).array();
  // u_i' eps = sqrt(n) d_i, so the weighted quadratic form is n sum w d^2.
  const double quad = n * (w * est.d_hat.array().square()).sum();
  const double center = (w * est.s2_hat.array()).sum();
  const double denom2 = 2.0 * (w.square() * est.s2_hat.array().square()).sum();
  if (!(denom2 > 0.0)) {
    throw_numeric("stat_divergent: degenerate studentization (all S_i^2 zero)");
  }
  StatisticValue out;
  out.value = (quad - center) / std::sqrt(denom2);
  out.J_used = static_cast<int>(J);
  out.diagnostics = make_diagnostics(weights, est);
  return out;
}

namespace {

StatisticValue sandwich_stat(const kernel::KernelMatrix& K,
                             const regression::ProjectionMatrix& P,
                             const Eigen::VectorXd& eps) {
  if (K.size() != P.size() || eps.size() != K.size()) {
    throw_usage("stat_gp/stat_icm: size mismatch");
  }
  const Eigen::VectorXd w = P.apply(eps);
  StatisticValue out;
  out.value = w.dot(K.values * w) / static_cast<double>(K.size());
  out.J_used = static_cast<int>(K.size());
  out.gamma_used = K.spec.gamma;
  return out;
}

}  // namespace

StatisticValue stat_gp(const kernel::KernelMatrix& K,
                       const regression::ProjectionMatrix& P,
                       const Eigen::VectorXd& eps) {
  return sandwich_stat(K, P, eps);
}

StatisticValue stat_icm(const kernel::KernelMatrix& K,
                        const regression::ProjectionMatrix& P,
                        const Eigen::VectorXd& eps) {
  if (K.spec.gamma != 0.5) {
    throw_usage("stat_icm: kernel must use the fixed bandwidth gamma = 0.5");
  }
  return sandwich_stat(K, P, eps);
}

}  // namespace kcm::teststats
