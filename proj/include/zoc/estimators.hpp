#pragma once

#include "zoc/core.hpp"

#include <cstdint>

namespace zoc {

enum class EstimatorOption { G1, G2 };

struct GradEstimatorConfig {
  EstimatorOption option = EstimatorOption::G1;
  double delta = 1e-3;
  std::uint64_t batch_B = 1;   // G1
  std::uint64_t batch_B0 = 1;  // G2, epoch starts
  std::uint64_t batch_B1 = 1;  // G2, inner steps
  std::uint64_t period_q = 1;  // G2
  // Oracle evaluations fan out to this many threads. Draws and the
  // summation order are serial, so results do not depend on it.
  unsigned workers = 1;

  void validate() const;
};

struct GradientEstimate {
  Vector vector;
  std::uint64_t fevals = 0;
  // Standard error of the batch mean, sqrt(sum ||g_i - mean||^2 / (B (B-1))).
  // Zero when it is not defined (batch of one, or a variance-reduced step).
  double std_error = 0.0;
};

/// Uniform draw from the unit sphere in R^d (normalized Gaussian).
Vector sample_sphere(RngStream& rng, Eigen::Index d);

/// (d / 2 delta) [f_xi(x + delta u) - f_xi(x - delta u)] u
Vector two_point_estimate(const StochasticOracle& oracle, const Vector& x, double delta,
                          const Vector& u, SampleToken xi);

/// Average of `batch` two-point estimates. Each draw takes u first, then xi.
GradientEstimate minibatch_gradient(const StochasticOracle& oracle, const Vector& x,
                                    const GradEstimatorConfig& config, std::uint64_t batch,
                                    RngStream& rng);

/// g_prev + (1/B1) sum_i [ghat(x_t; u_i, xi_i) - ghat(x_prev; u_i, xi_i)] with
/// each (u_i, xi_i) shared by both points.
GradientEstimate vr_gradient_step(const StochasticOracle& oracle, const Vector& x_t,
                                  const Vector& x_prev, const Vector& g_prev,
                                  const GradEstimatorConfig& config, RngStream& rng);

/// Produces g_0, g_1, ... for a sequence of iterates according to the
/// configured option, tracking cumulative oracle calls.
class GradientEstimator {
 public:
  explicit GradientEstimator(GradEstimatorConfig config);

  GradientEstimate next(const StochasticOracle& oracle, const Vector& x, RngStream& rng);

  std::uint64_t step() const noexcept { return t_; }
  std::uint64_t cumulative_fevals() const noexcept { return cum_fevals_; }
  bool is_epoch_start(std::uint64_t t) const noexcept;
  const GradEstimatorConfig& config() const noexcept { return config_; }

 private:
  GradEstimatorConfig config_;
  std::uint64_t t_ = 0;
  std::uint64_t cum_fevals_ = 0;
  Vector x_prev_;
  Vector g_prev_;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of F_delta(x) = E_{u, xi} f_xi(x + delta u).
MeanEstimate smoothed_value_estimate(const StochasticOracle& oracle, const Vector& x,
                                     double delta, std::uint64_t M, RngStream& rng);

}  // namespace zoc
