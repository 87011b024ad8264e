#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "kcm/dgp.hpp"
#include "kcm/error.hpp"
#include "kcm/kernel.hpp"
#include "kcm/regression.hpp"
#include "kcm/selection.hpp"
#include "kcm/spectral.hpp"
#include "test_util.hpp"

using namespace kcm;
using Catch::Approx;

namespace {

struct TrainFixture {
  dgp::Dataset data;
  Eigen::VectorXd eps;
  regression::ProjectionMatrix P;

  explicit TrainFixture(dgp::DgpId id, int q, int n, std::uint64_t seed)
      : data(dgp::generate({id, q, n}, seed)) {
    auto fit = regression::fit_ols(data.X, data.y);
    eps = fit.residuals;
    P = regression::projection_matrix(regression::score_matrix(fit));
  }
};

}  // namespace

TEST_CASE("snr_nonasymptotic degenerate and closed-form cases") {
  const auto X = test_util::random_matrix(6, 2, 1);
  auto dec = spectral::eigendecompose(
      kernel::build_kernel_matrix(kernel::make_gaussian(0.5), X));

  CHECK(selection::snr_nonasymptotic(dec, Eigen::VectorXd::Zero(6), 3) ==
        -std::numeric_limits<double>::infinity());

  // Single-direction case reduces to ((n d1^2 - S1^2) / (sqrt(2) S1^2))^2.
  const auto eps = test_util::random_vector(6, 2);
  const auto est = spectral::directional_components(dec, eps, 1);
  const double d1 = est.d_hat[0];
  const double s2 = est.s2_hat[0];
  const double v = (6.0 * d1 * d1 - s2) / (std::sqrt(2.0) * s2);
  CHECK(selection::snr_nonasymptotic(dec, eps, 1) ==
        Approx(v * v).epsilon(1e-8));
}

TEST_CASE("snr numerator agrees with the spectral identity") {
  const auto X = test_util::random_matrix(8, 2, 3);
  auto dec = spectral::eigendecompose(
      kernel::build_kernel_matrix(kernel::make_gaussian(0.4), X));
  const auto eps = test_util::random_vector(8, 4);
  const Eigen::Index J = 4;
  const auto est = spectral::directional_components(dec, eps, J);
  const Eigen::MatrixXd Kt = dec.eigenvectors.leftCols(J) *
                             dec.eigenvalues.head(J).asDiagonal() *
                             dec.eigenvectors.leftCols(J).transpose();
  const double quad_dense = eps.dot(Kt * eps) / 8.0;
  const double quad_spectral =
      (dec.eigenvalues.head(J).array() * est.d_hat.array().square()).sum();
  CHECK(quad_dense == Approx(quad_spectral).epsilon(1e-8));
}

TEST_CASE("snr_nonasymptotic invariant to common weight rescaling") {
  const auto X = test_util::random_matrix(9, 2, 5);
  auto dec = spectral::eigendecompose(
      kernel::build_kernel_matrix(kernel::make_gaussian(0.6), X));
  const auto eps = test_util::random_vector(9, 6);
  const double base = selection::snr_nonasymptotic(dec, eps, 4);
  // Scaling every eigenvalue by c rescales all sigma_i^2 / n weights by c.
  auto scaled = dec;
  scaled.eigenvalues *= 7.5;
  scaled.floor_threshold *= 7.5;
  CHECK(selection::snr_nonasymptotic(scaled, eps, 4) ==
        Approx(base).epsilon(1e-10));
}

TEST_CASE("snr_asymptotic closed forms") {
  CHECK(selection::snr_asymptotic(Eigen::MatrixXd::Identity(5, 5),
                                  Eigen::VectorXd::Zero(5), 0.15) == 0.0);

  // eps = ones, K = all-ones: numerator 1, row statistics constant.
  CHECK(selection::snr_asymptotic(Eigen::MatrixXd::Ones(6, 6),
                                  Eigen::VectorXd::Ones(6), 0.15) ==
        Approx(1.0 / 0.15).epsilon(1e-12));
}

TEST_CASE("snr_asymptotic matches a double-loop oracle") {
  TrainFixture fx(dgp::DgpId::Dgp2, 4, 30, 42);
  auto K = kernel::build_kernel_matrix(kernel::make_gaussian(0.3), fx.data.X);
  const Eigen::MatrixXd Kp = regression::project_kernel(fx.P, K);
  const Eigen::VectorXd eps = fx.P.apply(fx.eps);

  const double n = 30.0;
  double numer = 0.0;
  std::vector<double> rows(30, 0.0);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      numer += eps[i] * Kp(i, j) * eps[j];
      rows[static_cast<std::size_t>(i)] += eps[i] * Kp(i, j) * eps[j] / n;
    }
  }
  numer /= n * n;
  double mean = 0.0;
  for (double r : rows) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rows) var += (r - mean) * (r - mean);
  var /= n - 1.0;
  const double oracle = numer / (2.0 * std::sqrt(var) + 0.15);

  CHECK(selection::snr_asymptotic(Kp, eps, 0.15) ==
        Approx(oracle).epsilon(1e-8));
}

TEST_CASE("select_kernel trivial grids and tie-breaking") {
  TrainFixture fx(dgp::DgpId::Dgp1, 3, 24, 7);
  selection::SelectionOptions opts;
  opts.N_total = 24;

  const auto single = std::vector<kernel::KernelSpec>{kernel::make_gaussian(0.9)};
  auto r1 = selection::select_kernel(fx.data.X, fx.eps, fx.P, single, opts);
  CHECK(r1.chosen.gamma == 0.9);
  CHECK(r1.criterion_values.size() == 1);

  // Duplicate entries: the first (equal, smaller-index) wins and the score
  // trace keeps both.
  const auto dup = std::vector<kernel::KernelSpec>{kernel::make_gaussian(0.9),
                                                   kernel::make_gaussian(0.9)};
  auto r2 = selection::select_kernel(fx.data.X, fx.eps, fx.P, dup, opts);
  CHECK(r2.chosen.gamma == 0.9);
  CHECK(r2.criterion_values.size() == 2);
  CHECK(r2.criterion_values[0].second == r2.criterion_values[1].second);
}

TEST_CASE("select_kernel maximizes the criterion (exhaustive oracle)") {
  TrainFixture fx(dgp::DgpId::Dgp4, 10, 200, 11);
  // Training-sized subproblem: use the first 30 rows as the training split.
  Eigen::MatrixXd Xt = fx.data.X.topRows(30);
  Eigen::VectorXd et = fx.eps.head(30);
  Eigen::MatrixXd Gt = -Eigen::MatrixXd::Ones(30, 11);
  Gt.rightCols(10) = -Xt;
  auto Pt = regression::projection_matrix(Gt);

  const auto grid = kernel::gamma_grid(Xt, 7);
  for (auto method : {selection::SelectionMethod::NonAsymptotic,
                      selection::SelectionMethod::Asymptotic}) {
    selection::SelectionOptions opts;
    opts.method = method;
    opts.N_total = 200;
    auto result = selection::select_kernel(Xt, et, Pt, grid, opts);
    double best = -std::numeric_limits<double>::infinity();
    double best_gamma = 0.0;
    for (const auto& [gamma, score] : result.criterion_values) {
      if (std::isfinite(score) && score > best) {
        best = score;
        best_gamma = gamma;
      }
    }
    CHECK(result.chosen.gamma == best_gamma);
    CHECK(result.criterion_values.size() == grid.size());
  }
}

TEST_CASE("selection criterion is invariant to row permutation") {
  TrainFixture fx(dgp::DgpId::Dgp2, 3, 20, 13);
  const auto grid = std::vector<kernel::KernelSpec>{kernel::make_gaussian(0.4)};
  selection::SelectionOptions opts;
  opts.N_total = 20;
  auto base = selection::select_kernel(fx.data.X, fx.eps, fx.P, grid, opts);

  std::vector<int> perm(20);
  for (int i = 0; i < 20; ++i) perm[static_cast<std::size_t>(i)] = (i * 7) % 20;
  Eigen::MatrixXd Xp(20, 3);
  Eigen::VectorXd ep(20);
  Eigen::MatrixXd Gp(20, 4);
  const Eigen::MatrixXd G = -Eigen::MatrixXd::Ones(20, 4);
  for (int i = 0; i < 20; ++i) {
    Xp.row(i) = fx.data.X.row(perm[static_cast<std::size_t>(i)]);
    ep[i] = fx.eps[perm[static_cast<std::size_t>(i)]];
  }
  Eigen::MatrixXd Gperm(20, 4);
  Gperm.col(0).setConstant(-1.0);
  Gperm.rightCols(3) = -Xp;
  auto Pp = regression::projection_matrix(Gperm);
  auto permuted = selection::select_kernel(Xp, ep, Pp, grid, opts);
  CHECK(permuted.criterion_values[0].second ==
        Approx(base.criterion_values[0].second).epsilon(1e-8));
}

TEST_CASE("select_kernel reports when every bandwidth degenerates") {
  TrainFixture fx(dgp::DgpId::Dgp1, 3, 20, 17);
  const auto grid = std::vector<kernel::KernelSpec>{kernel::make_gaussian(0.5)};
  selection::SelectionOptions opts;
  opts.N_total = 20;
  CHECK_THROWS_AS(selection::select_kernel(fx.data.X,
                                           Eigen::VectorXd::Zero(20), fx.P,
                                           grid, opts),
                  Error);
}
