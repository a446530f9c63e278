#include "zoc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace zoc {
namespace {

constexpr std::uint64_t kChunk = 2048;

// Runs fn(i) for i in [0, n), split into contiguous ranges across workers.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2 * static_cast<std::uint64_t>(workers)) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::uint64_t per = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * per;
    const std::uint64_t hi = std::min(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

double two_point_coefficient(const StochasticOracle& oracle, const Vector& x, double delta,
                             const Vector& u, SampleToken xi) {
  const double scale = static_cast<double>(x.size()) / (2.0 * delta);
  const double fp = oracle.evaluate(x + delta * u, xi);
  const double fm = oracle.evaluate(x - delta * u, xi);
  return scale * (fp - fm);
}

struct Draws {
  Eigen::MatrixXd u;  // d x n, one direction per column
  std::vector<SampleToken> xi;
};

Draws draw_chunk(const StochasticOracle& oracle, Eigen::Index d, std::uint64_t n,
                 RngStream& rng) {
  Draws draws{Eigen::MatrixXd(d, static_cast<Eigen::Index>(n)), std::vector<SampleToken>(n)};
  for (std::uint64_t i = 0; i < n; ++i) {
    draws.u.col(static_cast<Eigen::Index>(i)) = sample_sphere(rng, d);
    draws.xi[i] = oracle.sample(rng);
  }
  return draws;
}

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("delta must be positive and finite");
  }
}

}  // namespace

void GradEstimatorConfig::validate() const {
  require_delta(delta);
  if (option == EstimatorOption::G1 && batch_B < 1) throw InvalidArgument("batch_B must be >= 1");
  if (option == EstimatorOption::G2) {
    if (batch_B0 < 1) throw InvalidArgument("batch_B0 must be >= 1");
    if (batch_B1 < 1) throw InvalidArgument("batch_B1 must be >= 1");
    if (period_q < 1) throw InvalidArgument("period_q must be >= 1");
  }
}

Vector sample_sphere(RngStream& rng, Eigen::Index d) {
  if (d < 1) throw InvalidArgument("sample_sphere: d must be >= 1");
  Vector u(d);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.normal();
    n = u.norm();
  } while (n == 0.0);
  return u / n;
}

Vector two_point_estimate(const StochasticOracle& oracle, const Vector& x, double delta,
                          const Vector& u, SampleToken xi) {
  require_delta(delta);
  check_dim(x, oracle.dim(), "two_point_estimate: x");
  check_dim(u, oracle.dim(), "two_point_estimate: u");
  return two_point_coefficient(oracle, x, delta, u, xi) * u;
}

GradientEstimate minibatch_gradient(const StochasticOracle& oracle, const Vector& x,
                                    const GradEstimatorConfig& config, std::uint64_t batch,
                                    RngStream& rng) {
  require_delta(config.delta);
  if (batch < 1) throw InvalidArgument("minibatch_gradient: batch must be >= 1");
  const Eigen::Index d = oracle.dim();
  check_dim(x, d, "minibatch_gradient");

  Vector sum = Vector::Zero(d);
  double sum_sq = 0.0;  // sum_i ||ghat_i||^2 = sum_i coef_i^2 since ||u_i|| = 1
  std::vector<double> coef;
  for (std::uint64_t done = 0; done < batch; done += kChunk) {
    const std::uint64_t n = std::min(kChunk, batch - done);
    const Draws draws = draw_chunk(oracle, d, n, rng);
    coef.assign(n, 0.0);
    parallel_for(n, config.workers, [&](std::uint64_t i) {
      coef[i] = two_point_coefficient(oracle, x, config.delta,
                                      draws.u.col(static_cast<Eigen::Index>(i)), draws.xi[i]);
    });
    for (std::uint64_t i = 0; i < n; ++i) {
      sum += coef[i] * draws.u.col(static_cast<Eigen::Index>(i));
      sum_sq += coef[i] * coef[i];
    }
  }

  GradientEstimate out;
  const double b = static_cast<double>(batch);
  out.vector = sum / b;
  out.fevals = 2 * batch;
  if (batch > 1) {
    const double ss = std::max(0.0, sum_sq - b * out.vector.squaredNorm());
    out.std_error = std::sqrt(ss / (b * (b - 1.0)));
  }
  return out;
}

GradientEstimate vr_gradient_step(const StochasticOracle& oracle, const Vector& x_t,
                                  const Vector& x_prev, const Vector& g_prev,
                                  const GradEstimatorConfig& config, RngStream& rng) {
  require_delta(config.delta);
  const std::uint64_t batch = config.batch_B1;
  if (batch < 1) throw InvalidArgument("vr_gradient_step: batch_B1 must be >= 1");
  const Eigen::Index d = oracle.dim();
  check_dim(x_t, d, "vr_gradient_step: x_t");
  check_dim(x_prev, d, "vr_gradient_step: x_prev");
  check_dim(g_prev, d, "vr_gradient_step: g_prev");

  Vector correction = Vector::Zero(d);
  std::vector<double> diff;
  for (std::uint64_t done = 0; done < batch; done += kChunk) {
    const std::uint64_t n = std::min(kChunk, batch - done);
    const Draws draws = draw_chunk(oracle, d, n, rng);
    diff.assign(n, 0.0);
    parallel_for(n, config.workers, [&](std::uint64_t i) {
      const auto u = draws.u.col(static_cast<Eigen::Index>(i));
      diff[i] = two_point_coefficient(oracle, x_t, config.delta, u, draws.xi[i]) -
                two_point_coefficient(oracle, x_prev, config.delta, u, draws.xi[i]);
    });
    for (std::uint64_t i = 0; i < n; ++i) {
      correction += diff[i] * draws.u.col(static_cast<Eigen::Index>(i));
    }
  }

  GradientEstimate out;
  out.vector = g_prev + correction / static_cast<double>(batch);
  out.fevals = 4 * batch;
  return out;
}

GradientEstimator::GradientEstimator(GradEstimatorConfig config) : config_(config) {
  config_.validate();
}

bool GradientEstimator::is_epoch_start(std::uint64_t t) const noexcept {
  return config_.option == EstimatorOption::G1 || t % config_.period_q == 0;
}

GradientEstimate GradientEstimator::next(const StochasticOracle& oracle, const Vector& x,
                                         RngStream& rng) {
  GradientEstimate est;
  if (config_.option == EstimatorOption::G1) {
    est = minibatch_gradient(oracle, x, config_, config_.batch_B, rng);
  } else if (is_epoch_start(t_)) {
    est = minibatch_gradient(oracle, x, config_, config_.batch_B0, rng);
  } else {
    est = vr_gradient_step(oracle, x, x_prev_, g_prev_, config_, rng);
  }
  x_prev_ = x;
  g_prev_ = est.vector;
  cum_fevals_ += est.fevals;
  ++t_;
  return est;
}

MeanEstimate smoothed_value_estimate(const StochasticOracle& oracle, const Vector& x,
                                     double delta, std::uint64_t M, RngStream& rng) {
  require_delta(delta);
  if (M < 2) throw InvalidArgument("smoothed_value_estimate: M must be >= 2");
  const Eigen::Index d = oracle.dim();
  check_dim(x, d, "smoothed_value_estimate");

  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < M; ++i) {
    const Vector u = sample_sphere(rng, d);
    const SampleToken xi = oracle.sample(rng);
    const double f = oracle.evaluate(x + delta * u, xi);
    const double dlt = f - mean;
    mean += dlt / static_cast<double>(i + 1);
    m2 += dlt * (f - mean);
  }
  const double m = static_cast<double>(M);
  return {mean, std::sqrt(m2 / (m - 1.0) / m)};
}

}  // namespace zoc
