#include "zoc/optimizers.hpp"

#include "zoc/stationarity.hpp"

#include <cmath>
#include <limits>

namespace zoc {
namespace {

struct StepsizeInputs {
  Algorithm algorithm;
  EstimatorOption option;
  double G;
  double d;
  double c;
  double delta;
  std::uint64_t T;
  double R;       // GCG only
  double delta0;  // GCG only
};

struct Stepsize {
  double gamma;
  bool clamped;
};

Stepsize theorem_stepsize(const StepsizeInputs& in) {
  const double sd = std::sqrt(in.d);
  if (in.algorithm == Algorithm::PGD) {
    if (in.option == EstimatorOption::G1) return {in.delta / (in.c * in.G * sd), false};
    return {in.delta / (2.0 * in.G * (in.d + in.c * sd)), false};
  }
  const double budget = in.delta0 + 2.0 * in.delta * in.G;
  const double T = static_cast<double>(in.T);
  double gamma;
  if (in.option == EstimatorOption::G1) {
    gamma = std::sqrt(2.0 * in.delta * budget / (T * in.c * in.G * sd)) / in.R;
  } else {
    gamma = std::sqrt(in.delta * budget / (T * in.G * (4.0 * in.d + 2.0 * in.c * sd))) / in.R;
  }
  if (gamma > 1.0) return {1.0, true};
  return {gamma, false};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

std::uint64_t default_objective_samples(const StochasticOracle& oracle) {
  return oracle.finite_size().value_or(1000);
}

}  // namespace

void RunConfig::validate() const {
  estimator.validate();
  if (steps_T < 1) throw InvalidArgument("steps_T must be >= 1");
  if (gamma) {
    require_positive(*gamma, "gamma");
    if (algorithm == Algorithm::GCG && *gamma > 1.0) {
      throw InvalidArgument("gamma must lie in (0, 1] for GCG");
    }
  }
  if (delta0 && !std::isfinite(*delta0)) throw InvalidArgument("delta0 must be finite");
  if (record_metric_every > 0 && metric_batch_M < 2) {
    throw InvalidArgument("metric_batch_M must be >= 2");
  }
}

const Vector& RunTrace::iterate(std::uint64_t t) const {
  if (t == 0) return initial_point;
  if (t > records.size()) throw InvalidArgument("RunTrace::iterate: t out of range");
  return records[t - 1].x;
}

const Vector& RunTrace::final_point() const { return iterate(records.size()); }

Vector prox_step(const Vector& x, const Vector& g, double gamma, const Regularizer& h) {
  if (!(gamma > 0.0)) throw InvalidArgument("prox_step: gamma must be positive");
  check_dim(g, x.size(), "prox_step: g");
  return reg_prox(h, x - gamma * g, gamma);
}

GcgStep gcg_step(const Vector& x, const Vector& g, double gamma, const Regularizer& h) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gcg_step: gamma must lie in (0, 1]");
  check_dim(g, x.size(), "gcg_step: g");
  GcgStep s;
  s.y = reg_lmo(h, g);
  check_dim(s.y, x.size(), "gcg_step: lmo");
  s.x_next = x + gamma * (s.y - x);
  return s;
}

RunTrace run(const ProblemSpec& problem, const RunConfig& config, const Vector& x0,
             RngStream& rng) {
  validate_problem(problem, config.algorithm);
  config.validate();
  check_dim(x0, problem.dim, "run: x0");
  const auto& oracle = *problem.oracle;
  const auto& h = *problem.regularizer;

  RngStream est_rng = rng.split(1);
  RngStream obj_rng = rng.split(2);
  RngStream metric_rng = rng.split(3);
  RngStream select_rng = rng.split(4);

  const std::uint64_t obj_samples =
      config.objective_samples ? config.objective_samples : default_objective_samples(oracle);

  RunTrace trace;
  trace.initial_point = x0;

  AnchorRadius ar;
  if (config.algorithm == Algorithm::GCG) {
    ar = reg_anchor_radius(h, problem.lipschitz_G, problem.dim);
    const double dist = (x0 - ar.anchor).norm();
    if (dist > ar.radius) {
      throw GCGInfeasibleStart("||x0 - anchor|| = " + std::to_string(dist) +
                               " exceeds radius " + std::to_string(ar.radius));
    }
  }

  if (config.gamma) {
    trace.gamma = *config.gamma;
  } else {
    double delta0 = 0.0;
    if (config.algorithm == Algorithm::GCG) {
      delta0 = config.delta0 ? *config.delta0 : objective_estimate(problem, x0, obj_samples, obj_rng);
    }
    const Stepsize s = theorem_stepsize({config.algorithm, config.estimator.option,
                                         problem.lipschitz_G, static_cast<double>(problem.dim),
                                         problem.smoothing_c, config.estimator.delta,
                                         config.steps_T, ar.radius, delta0});
    trace.gamma = s.gamma;
    if (s.clamped) trace.warnings.emplace_back("theorem stepsize exceeds 1 for GCG; clamped to 1");
  }
  if (ar.degenerate) {
    trace.warnings.emplace_back("degenerate problem: " + h.name() +
                                " forces the minimizer to the anchor");
  }

  GradientEstimator estimator(config.estimator);
  trace.records.reserve(config.steps_T);
  Vector x = x0;
  for (std::uint64_t t = 0; t < config.steps_T; ++t) {
    const GradientEstimate est = estimator.next(oracle, x, est_rng);
    if (config.algorithm == Algorithm::PGD) {
      x = prox_step(x, est.vector, trace.gamma, h);
    } else {
      x = gcg_step(x, est.vector, trace.gamma, h).x_next;
    }

    StepRecord rec;
    rec.t = t + 1;
    rec.x = x;
    rec.cum_fevals = estimator.cumulative_fevals();
    if (config.objective_every && rec.t % config.objective_every == 0) {
      rec.objective = objective_estimate(problem, x, obj_samples, obj_rng);
    }
    if (config.record_metric_every && rec.t % config.record_metric_every == 0) {
      const StationarityReport rep =
          config.algorithm == Algorithm::PGD
              ? pgsp_metric_estimate(problem, x, trace.gamma, config.estimator.delta,
                                     config.metric_batch_M, metric_rng)
              : cggsp_metric_estimate(problem, x, config.estimator.delta, config.metric_batch_M,
                                      metric_rng);
      rec.metric = rep.value;
      trace.metric_fevals += rep.fevals;
    }
    trace.records.push_back(std::move(rec));
  }

  const OutputSelection sel = select_output(trace, select_rng);
  trace.output_index = sel.index;
  trace.output_point = sel.point;
  return trace;
}

OutputSelection select_output(const RunTrace& trace, RngStream& rng) {
  if (trace.records.empty()) throw EmptyTrace("select_output: trace has no steps");
  OutputSelection sel;
  sel.index = rng.uniform_index(trace.records.size());
  sel.point = trace.iterate(sel.index);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    if (rec.metric && *rec.metric < best) {
      best = *rec.metric;
      sel.best_metric_index = rec.t;
    }
  }
  return sel;
}

//---------------------------------------------------------------------------//
// Theorem hyperparameters
//---------------------------------------------------------------------------//

std::string to_string(TheoremKind kind) {
  switch (kind) {
    case TheoremKind::PGD_G1: return "pgd_g1";
    case TheoremKind::PGD_G2: return "pgd_g2";
    case TheoremKind::GCG_G1: return "gcg_g1";
    case TheoremKind::GCG_G2: return "gcg_g2";
  }
  return "?";
}

TheoremKind theorem_kind_from_string(const std::string& s) {
  for (auto k : {TheoremKind::PGD_G1, TheoremKind::PGD_G2, TheoremKind::GCG_G1,
                 TheoremKind::GCG_G2}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown hyperparameter kind '" + s +
                        "' (expected pgd_g1, pgd_g2, gcg_g1 or gcg_g2)");
}

std::uint64_t ceil_count(double x) {
  if (!std::isfinite(x) || x < 0.0) throw InvalidArgument("ceil_count: not a finite count");
  if (x >= 1.8e19) throw InvalidArgument("ceil_count: count overflows 64 bits");
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t fevals_for_schedule(const GradEstimatorConfig& est, std::uint64_t T) {
  if (est.option == EstimatorOption::G1) return 2 * T * est.batch_B;
  const std::uint64_t starts = (T + est.period_q - 1) / est.period_q;
  return 2 * est.batch_B0 * starts + 4 * est.batch_B1 * (T - starts);
}

TheoremHyperParams theorem_hyperparams(TheoremKind kind, const TheoremInputs& in) {
  require_positive(in.G, "G");
  require_positive(in.delta, "delta");
  require_positive(in.epsilon, "epsilon");
  require_positive(in.c, "c");
  if (in.d < 1) throw InvalidArgument("d must be >= 1");
  if (!std::isfinite(in.delta0) || in.delta0 < 0.0) {
    throw InvalidArgument("delta0 must be finite and nonnegative");
  }
  const bool gcg = kind == TheoremKind::GCG_G1 || kind == TheoremKind::GCG_G2;
  if (gcg) {
    if (!in.R) throw MissingRadius("R is required for " + to_string(kind));
    require_positive(*in.R, "R");
  }

  const double G = in.G;
  const double d = static_cast<double>(in.d);
  const double sd = std::sqrt(d);
  const double c = in.c;
  const double eps2 = in.epsilon * in.epsilon;
  const double R = in.R.value_or(0.0);
  const double budget = in.delta0 + 2.0 * in.delta * G;

  TheoremHyperParams hp;
  hp.kind = kind;
  GradEstimatorConfig sched;
  switch (kind) {
    case TheoremKind::PGD_G1:
      hp.T = ceil_count(8.0 * c * G * sd * budget / (in.delta * eps2));
      hp.B = ceil_count(1024.0 * d * G * G / eps2);
      break;
    case TheoremKind::PGD_G2:
      hp.B0 = ceil_count(1764.0 * d * G * G / eps2);
      hp.B1 = hp.q = ceil_count(42.0 * sd * G / in.epsilon);
      hp.T = ceil_count(320.0 * G * (d + c * sd) * budget / (in.delta * eps2));
      break;
    case TheoremKind::GCG_G1:
      hp.T = ceil_count(32.0 * c * G * R * R * sd * budget / (in.delta * eps2));
      hp.B = ceil_count(1764.0 * d * R * R * G * G / eps2);
      break;
    case TheoremKind::GCG_G2:
      hp.B0 = ceil_count(676.0 * d * R * R * G * G / eps2);
      hp.B1 = hp.q = ceil_count(26.0 * R * G * sd / in.epsilon);
      hp.T = ceil_count(16.0 * G * R * R * (4.0 * d + 2.0 * c * sd) * budget / (in.delta * eps2));
      break;
  }
  const bool g2 = kind == TheoremKind::PGD_G2 || kind == TheoremKind::GCG_G2;
  if (g2) {
    // Whole epochs only, so the ceil(T/q) epoch starts equal floor(T/q).
    hp.T = (hp.T + hp.q - 1) / hp.q * hp.q;
    sched.option = EstimatorOption::G2;
    sched.batch_B0 = hp.B0;
    sched.batch_B1 = hp.B1;
    sched.period_q = hp.q;
  } else {
    sched.option = EstimatorOption::G1;
    sched.batch_B = hp.B;
  }

  const Stepsize s = theorem_stepsize({gcg ? Algorithm::GCG : Algorithm::PGD, sched.option, G, d,
                                       c, in.delta, hp.T, R, in.delta0});
  hp.gamma = s.gamma;
  hp.gamma_clamped = s.clamped;
  hp.predicted_fevals = fevals_for_schedule(sched, hp.T);
  return hp;
}

RunConfig run_config_from_theorem(const TheoremHyperParams& hp, double delta) {
  RunConfig cfg;
  const bool gcg = hp.kind == TheoremKind::GCG_G1 || hp.kind == TheoremKind::GCG_G2;
  cfg.algorithm = gcg ? Algorithm::GCG : Algorithm::PGD;
  cfg.steps_T = hp.T;
  cfg.gamma = hp.gamma;
  cfg.estimator.delta = delta;
  if (hp.kind == TheoremKind::PGD_G1 || hp.kind == TheoremKind::GCG_G1) {
    cfg.estimator.option = EstimatorOption::G1;
    cfg.estimator.batch_B = hp.B;
  } else {
    cfg.estimator.option = EstimatorOption::G2;
    cfg.estimator.batch_B0 = hp.B0;
    cfg.estimator.batch_B1 = hp.B1;
    cfg.estimator.period_q = hp.q;
  }
  return cfg;
}

}  // namespace zoc
