#include "kcm/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcm/error.hpp"

namespace kcm::bootstrap {

MultiplierDraw draw_multipliers(Eigen::Index n, Rng& rng) {
  if (n < 1) {
    throw_usage("draw_multipliers: n must be >= 1");
  }
  MultiplierDraw draw;
  draw.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    draw.values[i] = rng.next_uniform() < kMammenLowProb ? kMammenLow
                                                         : kMammenHigh;
  }
  return draw;
}

BootstrapDistribution bootstrap_distribution(
    const spectral::SpectralDecomposition& dec,
    const regression::ProjectionMatrix& P, const Eigen::VectorXd& eps,
    const teststats::StatisticKind& kind, const Eigen::VectorXd& weights,
    Eigen::Index J, int B, std::uint64_t seed) {
  using teststats::StatFamily;
  if (B < 1) {
    throw_usage("bootstrap_distribution: B must be >= 1");
  }
  if (eps.size() != dec.n || P.size() != dec.n) {
    throw_usage("bootstrap_distribution: size mismatch");
  }
  if (J < 1 || J > dec.rank_kept) {
    throw_usage("bootstrap_distribution: J out of range");
  }
  if (weights.size() < J) {
    throw_usage("bootstrap_distribution: weight sequence shorter than J");
  }

  const Eigen::VectorXd base = P.apply(eps);
  const Eigen::MatrixXd U = dec.eigenvectors.leftCols(J);
  const bool divergent = kind.family == StatFamily::Divergent;
  // Squared eigenvector entries feed the per-draw S_i^2 re-studentization.
  const Eigen::MatrixXd U2 = divergent ? U.array().square().matrix()
                                       : Eigen::MatrixXd();
  const auto w = weights.head(J).array();
  const double n = static_cast<double>(dec.n);

  BootstrapDistribution dist;
  dist.B = B;
  dist.kind = kind;
  dist.draws.resize(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    Rng rng(seed_hash(seed, "boot", static_cast<std::uint64_t>(b)));
    const MultiplierDraw V = draw_multipliers(dec.n, rng);
    const Eigen::VectorXd resid = P.apply(base.cwiseProduct(V.values));
    const Eigen::VectorXd c = U.transpose() * resid;
    double value = 0.0;
    if (!divergent) {
      value = (w * c.array().square()).sum();
    } else {
      const Eigen::VectorXd d_hat = c / std::sqrt(n);
      const Eigen::VectorXd s2 =
          ((U2.transpose() * resid.array().square().matrix()).array() -
           d_hat.array().square())
              .max(0.0);
      const double quad = (w * c.array().square()).sum();
      const double center = (w * s2.array()).sum();
      const double denom2 = 2.0 * (w.square() * s2.array().square()).sum();
      if (!(denom2 > 0.0)) {
        ++dist.failures;
        dist.draws[static_cast<std::size_t>(b)] =
            std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      value = (quad - center) / std::sqrt(denom2);
    }
    dist.draws[static_cast<std::size_t>(b)] = value;
  }
  if (dist.failures > 0) {
    if (100 * dist.failures > B) {
      throw_numeric("bootstrap_distribution: more than 1% of replicates "
                    "failed (" + std::to_string(dist.failures) + " of " +
                    std::to_string(B) + ")");
    }
    // Recorded failures are dropped from the usable draws.
    std::vector<double> ok;
    ok.reserve(dist.draws.size());
    for (double v : dist.draws) {
      if (!std::isnan(v)) ok.push_back(v);
    }
    dist.draws = std::move(ok);
  }
  return dist;
}

double p_value(const BootstrapDistribution& dist, double observed) {
  const std::size_t B = dist.draws.size();
  if (B == 0) {
    throw_usage("p_value: empty bootstrap distribution");
  }
  std::size_t count = 0;
  for (double v : dist.draws) {
    if (v >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(B + 1);
}

double critical_value(const BootstrapDistribution& dist, double alpha) {
  const std::size_t B = dist.draws.size();
  if (B == 0) {
    throw_usage("critical_value: empty bootstrap distribution");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw_usage("critical_value: alpha must be in (0, 1)");
  }
  std::vector<double> sorted(dist.draws);
  std::sort(sorted.begin(), sorted.end());
  // Higher order statistic: index ceil((1 - alpha)(B + 1)), 1-based, clamped.
  const double raw = std::ceil((1.0 - alpha) * static_cast<double>(B + 1));
  const std::size_t idx =
      std::min<std::size_t>(B, std::max<std::size_t>(1, static_cast<std::size_t>(raw)));
  return sorted[idx - 1];
}

TestOutcome make_outcome(const teststats::StatisticKind& kind,
                         const teststats::StatisticValue& observed,
                         const BootstrapDistribution& dist, double alpha) {
  TestOutcome out;
  out.kind = kind;
  out.statistic = observed;
  out.p_value = p_value(dist, observed.value);
  out.critical_value = critical_value(dist, alpha);
  out.reject = out.p_value < alpha;
  out.B = dist.B;
  out.alpha = alpha;
  out.bootstrap_failures = dist.failures;
  return out;
}

}  // namespace kcm::bootstrap
