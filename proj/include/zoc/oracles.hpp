#pragma once

#include "zoc/core.hpp"

#include <vector>

namespace zoc {

/// f(x) = <a, x>, sample ignored. Lipschitz constant ||a||.
class LinearOracle final : public StochasticOracle {
 public:
  explicit LinearOracle(Vector a) : a_(std::move(a)) {}
  Eigen::Index dim() const override { return a_.size(); }
  double evaluate(const Vector& x, SampleToken) const override { return a_.dot(x); }
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }
  const Vector& slope() const { return a_; }

 private:
  Vector a_;
};

/// f_xi(x) = <a + sigma z_xi, x> with z_xi ~ N(0, I) derived from the token.
/// F(x) = <a, x>.
class NoisyLinearOracle final : public StochasticOracle {
 public:
  NoisyLinearOracle(Vector a, double sigma) : a_(std::move(a)), sigma_(sigma) {}
  Eigen::Index dim() const override { return a_.size(); }
  double evaluate(const Vector& x, SampleToken xi) const override;
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }

 private:
  Vector a_;
  double sigma_;
};

/// f(x) = ||x - center||_1, sample ignored. Lipschitz constant sqrt(d).
class AbsSumOracle final : public StochasticOracle {
 public:
  explicit AbsSumOracle(Vector center) : center_(std::move(center)) {}
  Eigen::Index dim() const override { return center_.size(); }
  double evaluate(const Vector& x, SampleToken) const override {
    return (x - center_).lpNorm<1>();
  }
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }

 private:
  Vector center_;
};

/// f(x) = ||x - center||_2, sample ignored. Lipschitz constant 1.
class EuclideanNormOracle final : public StochasticOracle {
 public:
  explicit EuclideanNormOracle(Vector center) : center_(std::move(center)) {}
  Eigen::Index dim() const override { return center_.size(); }
  double evaluate(const Vector& x, SampleToken) const override { return (x - center_).norm(); }
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }

 private:
  Vector center_;
};

/// f(x) = 0.5 ||x||^2, sample ignored. Smoothing over the sphere adds the
/// constant delta^2 / 2, so grad F_delta(x) = x.
class QuadraticOracle final : public StochasticOracle {
 public:
  explicit QuadraticOracle(Eigen::Index d) : d_(d) {}
  Eigen::Index dim() const override { return d_; }
  double evaluate(const Vector& x, SampleToken) const override { return 0.5 * x.squaredNorm(); }
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }

 private:
  Eigen::Index d_;
};

class ConstantOracle final : public StochasticOracle {
 public:
  ConstantOracle(Eigen::Index d, double value) : d_(d), value_(value) {}
  Eigen::Index dim() const override { return d_; }
  double evaluate(const Vector&, SampleToken) const override { return value_; }
  SampleToken sample(RngStream& rng) const override { return rng.engine()(); }

 private:
  Eigen::Index d_;
  double value_;
};

/// Finite-sum robust regression f_i(x) = |<a_i, x> - b_i|.
/// L_i = ||a_i||, so G = sqrt(mean_i ||a_i||^2) satisfies E L^2 <= G^2.
class RobustRegressionOracle final : public StochasticOracle {
 public:
  RobustRegressionOracle(Eigen::MatrixXd A, Vector b);

  /// Rows a_i ~ N(0, I/d), b_i = <a_i, x*> + Laplace-ish noise, x* ~ N(0, I).
  static RobustRegressionOracle synthetic(Eigen::Index d, std::uint64_t n, RngStream& rng);

  Eigen::Index dim() const override { return A_.cols(); }
  double evaluate(const Vector& x, SampleToken xi) const override;
  SampleToken sample(RngStream& rng) const override { return rng.uniform_index(b_.size()); }
  std::optional<std::uint64_t> finite_size() const override {
    return static_cast<std::uint64_t>(b_.size());
  }
  double lipschitz_G() const;

 private:
  Eigen::MatrixXd A_;
  Vector b_;
};

}  // namespace zoc
