#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kcm::dgp {

enum class DgpId { Dgp1, Dgp2, Dgp3, Dgp4, Dgp5, Dgp6, Dgp7 };

DgpId parse_dgp(const std::string& token);  // "dgp1".."dgp7"
std::string dgp_token(DgpId id);

struct DgpSpec {
  DgpId id = DgpId::Dgp1;
  int q = 10;
  int n = 200;
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::optional<DgpSpec> truth;
  std::uint64_t seed = 0;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
};

// Regression function (including any nonlinear or local-drift term) and the
// error scale at covariate value x. The local drift of dgp7 divides by
// sqrt(n) with n the full sample size in spec.
double mean_function(const DgpSpec& spec, const Eigen::VectorXd& x);
double noise_scale(const DgpSpec& spec, const Eigen::VectorXd& x);

Dataset generate(const DgpSpec& spec, std::uint64_t seed);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<Eigen::Index> train_idx;  // ascending
  std::vector<Eigen::Index> test_idx;   // ascending
};

// Uniformly random disjoint partition with n_train = round(frac * N).
SplitResult split(const Dataset& data, double train_frac, std::uint64_t seed);

}  // namespace kcm::dgp
