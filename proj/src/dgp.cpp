#include "kcm/dgp.hpp"

#include <algorithm>
#include <cmath>

#include "kcm/error.hpp"
#include "kcm/rng.hpp"

namespace kcm::dgp {

DgpId parse_dgp(const std::string& token) {
  if (token.size() == 4 && token.compare(0, 3, "dgp") == 0 &&
      token[3] >= '1' && token[3] <= '7') {
    return static_cast<DgpId>(token[3] - '1');
  }
  throw_usage("unknown DGP '" + token + "' (expected dgp1..dgp7)");
}

std::string dgp_token(DgpId id) {
  return "dgp" + std::to_string(static_cast<int>(id) + 1);
}

namespace {

bool heteroskedastic(DgpId id) {
  return id == DgpId::Dgp6 || id == DgpId::Dgp7;
}

void validate(const DgpSpec& spec) {
  if (spec.q < 1) {
    throw_usage("dgp: covariate dimension must be >= 1");
  }
  if (heteroskedastic(spec.id) && spec.q != 10 && spec.q != 20) {
    throw_usage("dgp: " + dgp_token(spec.id) +
                " is specified only for q = 10 or q = 20");
  }
  if (spec.n < spec.q + 2) {
    throw_data("dgp: need n >= q + 2");
  }
}

double beta_entry(DgpId id) {
  // dgp1-5 use beta = 0.5 * ones; dgp6/dgp7 use beta = ones.
  return heteroskedastic(id) ? 1.0 : 0.5;
}

}  // namespace

double mean_function(const DgpSpec& spec, const Eigen::VectorXd& x) {
  const double alpha = 1.0;
  const double xb = beta_entry(spec.id) * x.sum();
  const double linear = alpha + xb;
  switch (spec.id) {
    case DgpId::Dgp1:
      return linear;
    case DgpId::Dgp2:
      return linear + 1.5 * std::exp(-xb * xb);
    case DgpId::Dgp3:
      return linear + 2.0 * std::cos(1.2 * x.norm());
    case DgpId::Dgp4:
      return linear + 0.5 * xb * xb;
    case DgpId::Dgp5:
      return linear + 1.5 * std::exp(0.25 * xb);
    case DgpId::Dgp6:
      return linear + x.norm();
    case DgpId::Dgp7:
      return linear + x.norm() / std::sqrt(static_cast<double>(spec.n));
  }
  return linear;
}

double noise_scale(const DgpSpec& spec, const Eigen::VectorXd& x) {
  switch (spec.id) {
    case DgpId::Dgp6:
      return std::abs(x.sum());
    case DgpId::Dgp7: {
      // d(X) = sqrt(0.1 + sum_{l<=5} X_l + sum_{l>=6} X_l^2), both dimensions.
      double acc = 0.1;
      for (Eigen::Index l = 0; l < x.size(); ++l) {
        acc += (l < 5) ? x[l] : x[l] * x[l];
      }
      return std::sqrt(std::max(acc, 0.0));
    }
    default:
      return 1.0;
  }
}

Dataset generate(const DgpSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  Dataset data;
  data.truth = spec;
  data.seed = seed;
  data.X.resize(spec.n, spec.q);
  data.y.resize(spec.n);
  const int half = spec.q / 2;
  for (int i = 0; i < spec.n; ++i) {
    for (int l = 0; l < spec.q; ++l) {
      double v = 0.0;
      switch (spec.id) {
        case DgpId::Dgp6:
          // First half uniform on [0, 1 + 0.1(l-1)]; rest normal with scale
          // 1 + 0.1(l-h).
          v = (l < half)
                  ? rng.next_uniform(0.0, 1.0 + 0.1 * l)
                  : rng.next_normal() * (1.0 + 0.1 * (l - half + 1));
          break;
        case DgpId::Dgp7:
          // First half uniform on [0, l]; rest normal with scale 1 + 0.1(l-h).
          v = (l < half)
                  ? rng.next_uniform(0.0, static_cast<double>(l + 1))
                  : rng.next_normal() * (1.0 + 0.1 * (l - half + 1));
          break;
        default:
          v = rng.next_normal();
          break;
      }
      data.X(i, l) = v;
    }
    const double e = rng.next_normal();
    const Eigen::VectorXd row = data.X.row(i);
    data.y[i] = mean_function(spec, row) + noise_scale(spec, row) * e;
  }
  return data;
}

SplitResult split(const Dataset& data, double train_frac, std::uint64_t seed) {
  const Eigen::Index N = data.rows();
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw_usage("split: training fraction must be in (0, 1)");
  }
  const Eigen::Index n_train =
      static_cast<Eigen::Index>(std::llround(train_frac * static_cast<double>(N)));
  const Eigen::Index n_test = N - n_train;
  if (n_train < 2 || n_test < 2) {
    throw_data("split: degenerate part sizes (train " +
               std::to_string(n_train) + ", test " + std::to_string(n_test) +
               ")");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (Eigen::Index i = N - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  SplitResult out;
  out.train_idx.assign(perm.begin(), perm.begin() + n_train);
  out.test_idx.assign(perm.begin() + n_train, perm.end());
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());

  auto take = [&](const std::vector<Eigen::Index>& idx) {
    Dataset part;
    part.truth = data.truth;
    part.seed = data.seed;
    part.X.resize(static_cast<Eigen::Index>(idx.size()), data.cols());
    part.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      part.X.row(static_cast<Eigen::Index>(k)) = data.X.row(idx[k]);
      part.y[static_cast<Eigen::Index>(k)] = data.y[idx[k]];
    }
    return part;
  };
  out.train = take(out.train_idx);
  out.test = take(out.test_idx);
  return out;
}

}  // namespace kcm::dgp
