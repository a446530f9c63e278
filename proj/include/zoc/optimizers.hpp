#pragma once

#include "zoc/core.hpp"
#include "zoc/estimators.hpp"
#include "zoc/regularizer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zoc {

struct RunConfig {
  Algorithm algorithm = Algorithm::PGD;
  GradEstimatorConfig estimator;
  std::uint64_t steps_T = 1;
  // Unset: use the stepsize prescribed by the convergence theory.
  std::optional<double> gamma;
  // Estimate of E[phi(x0)] - phi_min for theorem-mode GCG stepsizes.
  // Unset: phi(x0) estimate minus zero, i.e. assumes phi_min >= 0.
  std::optional<double> delta0;
  std::uint64_t seed = 0;
  std::uint64_t objective_every = 1;    // 0 = never
  std::uint64_t objective_samples = 0;  // 0 = full pass if finite-sum, else 1000
  std::uint64_t record_metric_every = 0;  // 0 = never
  std::uint64_t metric_batch_M = 2000;

  void validate() const;
};

struct StepRecord {
  std::uint64_t t = 0;  // x_t after t updates
  Vector x;
  std::optional<double> objective;
  std::uint64_t cum_fevals = 0;  // algorithm fevals spent to reach x_t
  std::optional<double> metric;
};

struct RunTrace {
  Vector initial_point;
  std::vector<StepRecord> records;  // t = 1..T
  std::uint64_t output_index = 0;   // uniform on {0, ..., T-1}
  Vector output_point;
  std::uint64_t metric_fevals = 0;  // spent on metric recording, not counted above
  double gamma = 0.0;               // stepsize actually used
  std::vector<std::string> warnings;

  std::uint64_t steps() const noexcept { return records.size(); }
  /// x_t for t in [0, T].
  const Vector& iterate(std::uint64_t t) const;
  const Vector& final_point() const;
};

/// prox_{gamma h}(x - gamma g)
Vector prox_step(const Vector& x, const Vector& g, double gamma, const Regularizer& h);

struct GcgStep {
  Vector y;
  Vector x_next;
};

/// y in LMO(g), x_next = x + gamma (y - x), 0 < gamma <= 1.
GcgStep gcg_step(const Vector& x, const Vector& g, double gamma, const Regularizer& h);

/// Runs T steps of zeroth-order proximal gradient descent (PGD) or
/// generalized conditional gradient (GCG) from x0.
RunTrace run(const ProblemSpec& problem, const RunConfig& config, const Vector& x0,
             RngStream& rng);

struct OutputSelection {
  std::uint64_t index = 0;
  Vector point;
  std::optional<std::uint64_t> best_metric_index;
};

/// Uniform draw of the output iterate from {0, ..., T-1}. Also reports the
/// record with the smallest recorded metric, if any were recorded.
OutputSelection select_output(const RunTrace& trace, RngStream& rng);

//---------------------------------------------------------------------------//
// Hyperparameters from the convergence theorems
//---------------------------------------------------------------------------//

enum class TheoremKind { PGD_G1, PGD_G2, GCG_G1, GCG_G2 };

std::string to_string(TheoremKind kind);
TheoremKind theorem_kind_from_string(const std::string& s);

struct TheoremInputs {
  double G = 1.0;
  Eigen::Index d = 1;
  double delta = 1e-3;
  double epsilon = 0.1;
  std::optional<double> R;
  double delta0 = 1.0;  // E[phi(x0)] - phi_min
  double c = 1.0;
};

struct TheoremHyperParams {
  TheoremKind kind = TheoremKind::PGD_G1;
  std::uint64_t T = 0;
  double gamma = 0.0;
  std::uint64_t B = 0;   // G1 kinds
  std::uint64_t B0 = 0;  // G2 kinds
  std::uint64_t B1 = 0;
  std::uint64_t q = 0;
  std::uint64_t predicted_fevals = 0;
  bool gamma_clamped = false;
};

TheoremHyperParams theorem_hyperparams(TheoremKind kind, const TheoremInputs& in);

/// 2TB for G1; 2 B0 ceil(T/q) + 4 B1 (T - ceil(T/q)) for G2 (epoch starts at
/// t = 0, q, 2q, ...).
std::uint64_t fevals_for_schedule(const GradEstimatorConfig& est, std::uint64_t T);

/// RunConfig carrying the theorem's T, stepsize and batch schedule.
RunConfig run_config_from_theorem(const TheoremHyperParams& hp, double delta);

/// ceil(x), treating values within a relative 1e-9 of an integer as that integer.
std::uint64_t ceil_count(double x);

}  // namespace zoc
