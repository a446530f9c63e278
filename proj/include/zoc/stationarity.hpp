#pragma once

#include "zoc/core.hpp"
#include "zoc/regularizer.hpp"

#include <optional>

namespace zoc {

enum class MetricKind { PGSPNorm, CGGSPGap };

/// Plug-in stationarity measure at a point. The exact smoothed gradient is
/// replaced by a batch-M estimate, so `value` is an estimate of an upper
/// bound on the min over the Goldstein subdifferential.
struct StationarityReport {
  MetricKind kind = MetricKind::PGSPNorm;
  double value = 0.0;
  double stderr_proxy = 0.0;
  std::uint64_t samples_M = 0;
  std::uint64_t fevals = 0;
  std::optional<double> gamma;
  double delta = 0.0;
};

inline constexpr std::uint64_t kDefaultMetricBatch = 2000;

/// (1/gamma) [x - prox_{gamma h}(x - gamma g)]
Vector gradient_mapping(const Vector& x, const Vector& g, double gamma, const Regularizer& h);

/// max_y [h(x) - h(y) + <y - x, -g>], attained at the LMO point.
double fw_gap(const Vector& x, const Vector& g, const Regularizer& h);

StationarityReport pgsp_metric_estimate(const ProblemSpec& problem, const Vector& x, double gamma,
                                        double delta, std::uint64_t M, RngStream& rng);

StationarityReport cggsp_metric_estimate(const ProblemSpec& problem, const Vector& x,
                                         double delta, std::uint64_t M, RngStream& rng);

}  // namespace zoc
