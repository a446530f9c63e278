#include "zoc/oracles.hpp"

#include <cmath>

namespace zoc {

double NoisyLinearOracle::evaluate(const Vector& x, SampleToken xi) const {
  RngStream noise(xi);
  double v = 0.0;
  for (Eigen::Index i = 0; i < a_.size(); ++i) v += (a_[i] + sigma_ * noise.normal()) * x[i];
  return v;
}

RobustRegressionOracle::RobustRegressionOracle(Eigen::MatrixXd A, Vector b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() < 1 || A_.cols() < 1 || A_.rows() != b_.size()) {
    throw InvalidArgument("RobustRegressionOracle: inconsistent data");
  }
}

RobustRegressionOracle RobustRegressionOracle::synthetic(Eigen::Index d, std::uint64_t n,
                                                         RngStream& rng) {
  if (d < 1 || n < 1) throw InvalidArgument("RobustRegressionOracle: empty problem");
  const auto rows = static_cast<Eigen::Index>(n);
  Vector truth(d);
  for (Eigen::Index j = 0; j < d; ++j) truth[j] = rng.normal();
  Eigen::MatrixXd A(rows, d);
  Vector b(rows);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = scale * rng.normal();
    // Difference of two exponentials is Laplace(0, 0.1).
    const double noise = 0.1 * (std::log(1.0 - rng.uniform()) - std::log(1.0 - rng.uniform()));
    b[i] = A.row(i).dot(truth) + noise;
  }
  return RobustRegressionOracle(std::move(A), std::move(b));
}

double RobustRegressionOracle::evaluate(const Vector& x, SampleToken xi) const {
  if (xi >= static_cast<std::uint64_t>(b_.size())) {
    throw InvalidArgument("RobustRegressionOracle: sample index out of range");
  }
  const auto i = static_cast<Eigen::Index>(xi);
  return std::abs(A_.row(i).dot(x) - b_[i]);
}

double RobustRegressionOracle::lipschitz_G() const {
  return std::sqrt(A_.rowwise().squaredNorm().mean());
}

}  // namespace zoc
