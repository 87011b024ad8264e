#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kcm/dgp.hpp"
#include "kcm/error.hpp"
#include "kcm/kernel.hpp"
#include "kcm/regression.hpp"
#include "test_util.hpp"

using namespace kcm;
using Catch::Approx;

TEST_CASE("fit_ols recovers exact linear data") {
  const auto X = test_util::random_matrix(40, 4, 1);
  Eigen::VectorXd theta(5);
  theta << 1.0, 0.5, 0.5, 0.5, 0.5;
  const Eigen::VectorXd y =
      theta[0] + (X * theta.tail(4)).array();
  auto fit = regression::fit_ols(X, y);
  CHECK((fit.theta_hat - theta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_ols constant response on centered covariates") {
  auto X = test_util::random_matrix(30, 3, 2);
  X.rowwise() -= X.colwise().mean();
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 2.5);
  auto fit = regression::fit_ols(X, y);
  CHECK(fit.theta_hat[0] == Approx(2.5).margin(1e-8));
  CHECK(fit.theta_hat.tail(3).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_ols matches explicit normal-equations oracle") {
  const auto data = dgp::generate({dgp::DgpId::Dgp1, 10, 200}, 900);
  auto fit = regression::fit_ols(data.X, data.y);

  Eigen::MatrixXd D(200, 11);
  D.col(0).setOnes();
  D.rightCols(10) = data.X;
  const Eigen::VectorXd oracle =
      (D.transpose() * D).inverse() * (D.transpose() * data.y);
  CHECK((fit.theta_hat - oracle).cwiseAbs().maxCoeff() < 1e-6);

  // Normal equations: design' residuals = 0.
  CHECK((D.transpose() * fit.residuals).cwiseAbs().maxCoeff() <
        1e-6 * 200.0);
}

TEST_CASE("fit_ols rejects rank-deficient designs") {
  Eigen::MatrixXd X(20, 2);
  X.col(0) = test_util::random_vector(20, 3);
  X.col(1) = 2.0 * X.col(0);  // collinear
  CHECK_THROWS_AS(regression::fit_ols(X, test_util::random_vector(20, 4)),
                  Error);
  // n <= q + 1
  CHECK_THROWS_AS(regression::fit_ols(test_util::random_matrix(4, 3, 5),
                                      test_util::random_vector(4, 6)),
                  Error);
}

TEST_CASE("score_matrix is the negated design") {
  Eigen::MatrixXd X(3, 1);
  X << 2, -1, 4;
  auto fit = regression::fit_ols(X, Eigen::VectorXd::LinSpaced(3, 0.0, 2.0));
  const auto G = regression::score_matrix(fit);
  CHECK(G(0, 0) == -1.0);
  CHECK(G(0, 1) == -2.0);
  CHECK(G == -fit.design);
}

TEST_CASE("score rows match central finite differences") {
  const auto X = test_util::random_matrix(12, 3, 7);
  const auto y = test_util::random_vector(12, 8);
  auto fit = regression::fit_ols(X, y);
  const auto G = regression::score_matrix(fit);
  const double h = 1e-6;
  for (int i = 0; i < 12; ++i) {
    for (int p = 0; p < 4; ++p) {
      auto resid_at = [&](double bump) {
        Eigen::VectorXd theta = fit.theta_hat;
        theta[p] += bump;
        return y[i] - fit.design.row(i).dot(theta);
      };
      const double fd = (resid_at(h) - resid_at(-h)) / (2.0 * h);
      CHECK(G(i, p) == Approx(fd).margin(1e-4));
    }
  }
}

TEST_CASE("projection_matrix: centering matrix special case") {
  const Eigen::MatrixXd G = Eigen::MatrixXd::Ones(6, 1);
  auto P = regression::projection_matrix(G);
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(6, 6) -
      Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0);
  CHECK(P.values.isApprox(centering, 1e-12));
  CHECK(P.score_rank == 1);
}

TEST_CASE("projection matrix properties") {
  const auto data = dgp::generate({dgp::DgpId::Dgp1, 10, 100}, 17);
  auto fit = regression::fit_ols(data.X, data.y);
  auto P = regression::projection_matrix(regression::score_matrix(fit));

  // Symmetric and idempotent.
  CHECK((P.values - P.values.transpose()).norm() <= 1e-8 * 100.0);
  CHECK((P.values * P.values - P.values).norm() <= 1e-8 * 100.0);

  // Annihilates scores.
  const auto G = regression::score_matrix(fit);
  CHECK((P.values * G).norm() <= 1e-8 * G.norm());

  // trace = n - d.
  CHECK(P.values.trace() == Approx(100.0 - 11.0).margin(1e-6));

  // Eigenvalues are exactly {0 (d times), 1 (n-d times)}.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.values);
  for (int i = 0; i < 100; ++i) {
    const double ev = es.eigenvalues()[i];
    CHECK((std::abs(ev) < 1e-8 || std::abs(ev - 1.0) < 1e-8));
  }

  // Vectors orthogonal to col(G) are fixed points.
  Eigen::VectorXd v = test_util::random_vector(100, 18);
  v = P.apply(v);  // now orthogonal to col(G)
  CHECK((P.values * v - v).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(regression::projection_matrix(Eigen::MatrixXd::Ones(5, 2)),
                  Error);
}

TEST_CASE("project_residuals annihilates and idempotes") {
  const auto data = dgp::generate({dgp::DgpId::Dgp1, 3, 40}, 19);
  auto fit = regression::fit_ols(data.X, data.y);
  const auto G = regression::score_matrix(fit);
  auto P = regression::projection_matrix(G);

  // eps in col(G) projects to zero.
  const Eigen::VectorXd in_span = G * Eigen::VectorXd::LinSpaced(4, 1.0, 2.0);
  CHECK(regression::project_residuals(P, in_span).cwiseAbs().maxCoeff() <
        1e-8);

  // OLS residuals are already orthogonal to the design.
  CHECK((regression::project_residuals(P, fit.residuals) - fit.residuals)
            .cwiseAbs()
            .maxCoeff() < 1e-8);

  // Idempotency.
  const auto eps = test_util::random_vector(40, 20);
  const auto once = regression::project_residuals(P, eps);
  const auto twice = regression::project_residuals(P, once);
  CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(regression::project_residuals(P, Eigen::VectorXd::Zero(3)),
                  Error);
}

TEST_CASE("project_kernel: centering kills the all-ones kernel") {
  auto P = regression::projection_matrix(Eigen::MatrixXd::Ones(5, 1));
  kernel::KernelMatrix ones{Eigen::MatrixXd::Ones(5, 5),
                            kernel::make_gaussian(1.0)};
  const auto Kp = regression::project_kernel(P, ones);
  CHECK(Kp.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("project_kernel quadratic-form associativity") {
  const auto X = test_util::random_matrix(20, 2, 23);
  const auto y = test_util::random_vector(20, 24);
  auto fit = regression::fit_ols(X, y);
  auto P = regression::projection_matrix(regression::score_matrix(fit));
  auto K = kernel::build_kernel_matrix(kernel::make_gaussian(0.5), X);
  const auto Kp = regression::project_kernel(P, K);
  CHECK((Kp - Kp.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  const auto eps = test_util::random_vector(20, 25);
  const auto Pe = P.apply(eps);
  CHECK(eps.dot(Kp * eps) ==
        Approx(Pe.dot(K.values * Pe)).epsilon(1e-8));

  // PSD.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kp);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("projected residual components are invariant to the coefficient") {
  // (Pi eps_theta)' u is the same for every theta: the residual difference
  // lies in the design column space, which Pi annihilates.
  const auto data = dgp::generate({dgp::DgpId::Dgp2, 4, 60}, 29);
  auto fit = regression::fit_ols(data.X, data.y);
  auto P = regression::projection_matrix(regression::score_matrix(fit));

  const Eigen::VectorXd bump = test_util::random_vector(5, 30);
  const Eigen::VectorXd eps_star =
      data.y - fit.design * (fit.theta_hat + bump);
  const auto p1 = P.apply(fit.residuals);
  const auto p2 = P.apply(eps_star);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-8);
}
