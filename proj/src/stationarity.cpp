#include "zoc/stationarity.hpp"

#include "zoc/estimators.hpp"

#include <cmath>

namespace zoc {

Vector gradient_mapping(const Vector& x, const Vector& g, double gamma, const Regularizer& h) {
  if (!(gamma > 0.0)) throw InvalidArgument("gradient_mapping: gamma must be positive");
  check_dim(g, x.size(), "gradient_mapping: g");
  return (x - reg_prox(h, x - gamma * g, gamma)) / gamma;
}

double fw_gap(const Vector& x, const Vector& g, const Regularizer& h) {
  check_dim(g, x.size(), "fw_gap: g");
  const double hx = reg_value(h, x);
  if (!std::isfinite(hx)) throw InfeasiblePoint("fw_gap: h(x) is not finite");
  const Vector y = reg_lmo(h, g);
  return hx - h.value(y) - (y - x).dot(g);
}

StationarityReport pgsp_metric_estimate(const ProblemSpec& problem, const Vector& x, double gamma,
                                        double delta, std::uint64_t M, RngStream& rng) {
  if (M < 2) throw InvalidArgument("pgsp_metric_estimate: M must be >= 2");
  GradEstimatorConfig cfg;
  cfg.delta = delta;
  const GradientEstimate est = minibatch_gradient(*problem.oracle, x, cfg, M, rng);

  StationarityReport r;
  r.kind = MetricKind::PGSPNorm;
  r.value = gradient_mapping(x, est.vector, gamma, *problem.regularizer).norm();
  r.stderr_proxy = est.std_error;  // the mapping is 1-Lipschitz in g
  r.samples_M = M;
  r.fevals = est.fevals;
  r.gamma = gamma;
  r.delta = delta;
  return r;
}

StationarityReport cggsp_metric_estimate(const ProblemSpec& problem, const Vector& x,
                                         double delta, std::uint64_t M, RngStream& rng) {
  if (M < 2) throw InvalidArgument("cggsp_metric_estimate: M must be >= 2");
  const auto& h = *problem.regularizer;
  if (!std::isfinite(reg_value(h, x))) throw InfeasiblePoint("cggsp_metric_estimate: h(x) is not finite");
  const AnchorRadius ar = reg_anchor_radius(h, problem.lipschitz_G, problem.dim);

  GradEstimatorConfig cfg;
  cfg.delta = delta;
  const GradientEstimate est = minibatch_gradient(*problem.oracle, x, cfg, M, rng);

  StationarityReport r;
  r.kind = MetricKind::CGGSPGap;
  r.value = fw_gap(x, est.vector, h);
  r.stderr_proxy = 2.0 * ar.radius * est.std_error;
  r.samples_M = M;
  r.fevals = est.fevals;
  r.delta = delta;
  return r;
}

}  // namespace zoc
