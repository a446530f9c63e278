#include "zoc/proptest.hpp"

#include "zoc/estimators.hpp"
#include "zoc/optimizers.hpp"
#include "zoc/oracles.hpp"
#include "zoc/regularizer.hpp"
#include "zoc/stationarity.hpp"
#include "zoc/text.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace zoc {
namespace {

constexpr std::size_t kMaxCounterexamples = 3;

std::string vec_str(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s + ")";
}

class Suite {
 public:
  explicit Suite(std::ostream& log) : log_(log) {}

  /// Records one check of invariant `name`; `detail` is built only on failure.
  void check(const std::string& name, bool ok, const std::function<std::string()>& detail) {
    InvariantOutcome& o = outcome(name);
    ++o.checked;
    if (ok) return;
    ++o.violated;
    if (o.counterexamples.size() < kMaxCounterexamples) o.counterexamples.push_back(detail());
  }

  void note(const std::string& line) { log_ << "  " << line << "\n"; }

  void report(ProptestResult& out) {
    for (auto& o : order_) {
      log_ << (o.violated ? "FAIL " : "ok   ") << o.name << " (" << o.checked << " checks";
      if (o.violated) log_ << ", " << o.violated << " violated";
      log_ << ")\n";
      for (const auto& c : o.counterexamples) log_ << "    counterexample: " << c << "\n";
      out.invariants.push_back(std::move(o));
    }
    order_.clear();
  }

 private:
  InvariantOutcome& outcome(const std::string& name) {
    for (auto& o : order_) {
      if (o.name == name) return o;
    }
    order_.push_back({name, 0, 0, {}});
    return order_.back();
  }

  std::ostream& log_;
  std::vector<InvariantOutcome> order_;
};

Vector normal_vector(RngStream& rng, Eigen::Index d, double scale = 1.0) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

double uniform_in(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Random regularizer with a finite growth radius for G. Kinds cycle
/// through elastic net, squared l2, ball, box, and l1 with lambda1 > G.
RegularizerPtr random_regularizer(RngStream& rng, Eigen::Index d, double G, int kind) {
  switch (kind % 5) {
    case 0:
      return std::make_shared<ElasticNet>(uniform_in(rng, 0.01, 1.0), uniform_in(rng, 0.05, 2.0));
    case 1:
      return std::make_shared<SquaredL2>(uniform_in(rng, 0.05, 2.0));
    case 2:
      return std::make_shared<BallIndicator>(normal_vector(rng, d), uniform_in(rng, 0.1, 3.0));
    case 3: {
      Vector lo = normal_vector(rng, d);
      Vector hi = lo;
      for (Eigen::Index i = 0; i < d; ++i) hi[i] += uniform_in(rng, 0.1, 2.0);
      return std::make_shared<BoxIndicator>(lo, hi);
    }
    default:
      return std::make_shared<L1Norm>(G * uniform_in(rng, 1.01, 3.0));
  }
}

/// Uniform point in the closed ball of radius r around c.
Vector point_in_ball(RngStream& rng, const Vector& c, double r) {
  const Vector u = sample_sphere(rng, c.size());
  return c + r * std::pow(rng.uniform(), 1.0 / static_cast<double>(c.size())) * u;
}

/// Argmin of the strictly convex scalar objective whose increments are
/// given by diff(a, b) = phi(a) - phi(b), over [lo, hi].
double golden_section(const std::function<double(double, double)>& diff, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), e = a + r * (b - a);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (diff(c, e) < 0.0) {
      b = e;
      e = c;
      c = b - r * (b - a);
    } else {
      a = c;
      c = e;
      e = a + r * (b - a);
    }
  }
  return 0.5 * (a + b);
}

//---------------------------------------------------------------------------//

void suite_prox(Suite& s, std::uint64_t trials, RngStream& rng) {
  for (std::uint64_t k = 0; k < trials; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(6));
    const auto h = random_regularizer(rng, d, 1.0, static_cast<int>(k));
    const double gamma = std::exp(uniform_in(rng, std::log(0.01), std::log(10.0)));
    const Vector v = normal_vector(rng, d, 2.0);
    const Vector w = normal_vector(rng, d, 2.0);
    const Vector p = reg_prox(*h, v, gamma);
    const Vector y = p + normal_vector(rng, d, uniform_in(rng, 1e-3, 1.0));

    const double lhs = h->value(p) + (p - v).squaredNorm() / (2.0 * gamma);
    const double rhs = h->value(y) + (y - v).squaredNorm() / (2.0 * gamma);
    s.check("prox_optimality", lhs <= rhs + 1e-10, [&] {
      return h->name() + " gamma=" + format_double(gamma) + " v=" + vec_str(v) +
             " probe=" + vec_str(y);
    });

    const Vector q = reg_prox(*h, w, gamma);
    s.check("prox_nonexpansive", (p - q).norm() <= (v - w).norm() * (1.0 + 1e-12) + 1e-15, [&] {
      return h->name() + " gamma=" + format_double(gamma) + " v=" + vec_str(v) +
             " w=" + vec_str(w);
    });

    // Separable regularizers: compare with scalar brute force per coordinate.
    double l1 = 0.0, l2 = 0.0;
    if (const auto* en = dynamic_cast<const ElasticNet*>(h.get())) {
      l1 = en->lambda1();
      l2 = en->lambda2();
    } else if (const auto* l = dynamic_cast<const L1Norm*>(h.get())) {
      l1 = l->lambda1();
    } else {
      continue;
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      const double vi = v[i];
      const auto diff = [&](double a, double b) {
        return l1 * (std::abs(a) - std::abs(b)) +
               (a - b) * (0.5 * l2 * (a + b) + (a + b - 2.0 * vi) / (2.0 * gamma));
      };
      const double brute = golden_section(diff, -std::abs(vi) - 1.0, std::abs(vi) + 1.0);
      s.check("prox_matches_golden_section", std::abs(brute - p[i]) <= 1e-8, [&] {
        return h->name() + " gamma=" + format_double(gamma) + " v_i=" + format_double(vi) +
               " closed=" + format_double(p[i]) + " brute=" + format_double(brute);
      });
    }
  }
}

void suite_lmo(Suite& s, std::uint64_t trials, RngStream& rng) {
  for (std::uint64_t k = 0; k < trials; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(6));
    const double G = uniform_in(rng, 0.1, 3.0);
    const auto h = random_regularizer(rng, d, G, static_cast<int>(k));
    const AnchorRadius ar = reg_anchor_radius(*h, G, d);

    // ||g|| <= G
    const Vector g = sample_sphere(rng, d) * G * rng.uniform();
    const Vector y = reg_lmo(*h, g);
    const double best = h->value(y) + y.dot(g);
    for (int j = 0; j < 10; ++j) {
      const Vector probe = y + normal_vector(rng, d, uniform_in(rng, 1e-3, 2.0));
      const double other = h->value(probe) + probe.dot(g);
      s.check("lmo_optimality", best <= other + 1e-10, [&] {
        return h->name() + " g=" + vec_str(g) + " lmo=" + vec_str(y) + " probe=" + vec_str(probe);
      });
    }
    s.check("lmo_bounded", (y - ar.anchor).norm() <= ar.radius + 1e-9, [&] {
      return h->name() + " G=" + format_double(G) + " g=" + vec_str(g) + " lmo=" + vec_str(y) +
             " R=" + format_double(ar.radius);
    });

    // Growth condition outside the radius.
    const double dist = ar.radius * uniform_in(rng, 1.0 + 1e-6, 10.0);
    const Vector x = ar.anchor + dist * sample_sphere(rng, d);
    const double hx = h->value(x);
    const double bound = h->value(ar.anchor) + G * (x - ar.anchor).norm();
    s.check("growth_outside_radius", hx > bound, [&] {
      return h->name() + " G=" + format_double(G) + " x=" + vec_str(x) + " h(x)=" +
             format_double(hx) + " bound=" + format_double(bound);
    });
  }
}

void suite_estimator(Suite& s, std::uint64_t trials, RngStream& rng) {
  const std::uint64_t N = std::max<std::uint64_t>(trials, 100);
  const double c16 = 16.0 * std::sqrt(2.0 * std::numbers::pi);

  {
    const Eigen::Index d = 5;
    const Vector a = normal_vector(rng, d);
    const LinearOracle lin(a);
    GradEstimatorConfig cfg;
    cfg.delta = 0.1;
    const auto est = minibatch_gradient(lin, normal_vector(rng, d), cfg, N, rng);
    const double err = (est.vector - a).norm();
    s.check("unbiased_linear", err <= 3.0 * est.std_error, [&] {
      return "error=" + format_double(err) + " stderr=" + format_double(est.std_error);
    });

    const QuadraticOracle quad(d);
    const Vector x = normal_vector(rng, d);
    const auto qe = minibatch_gradient(quad, x, cfg, N, rng);
    const double qerr = (qe.vector - x).norm();
    s.check("unbiased_quadratic", qerr <= 3.0 * qe.std_error, [&] {
      return "x=" + vec_str(x) + " error=" + format_double(qerr) +
             " stderr=" + format_double(qe.std_error);
    });
  }

  {
    // Second moment on a 1-Lipschitz oracle.
    const Eigen::Index d = 8;
    const EuclideanNormOracle norm_oracle(normal_vector(rng, d));
    const Vector x = normal_vector(rng, d);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < N; ++i) {
      const Vector u = sample_sphere(rng, d);
      acc += two_point_estimate(norm_oracle, x, 0.01, u, 0).squaredNorm();
    }
    const double m2 = acc / static_cast<double>(N);
    const double bound = c16 * static_cast<double>(d);
    s.note("second moment: empirical " + format_double(m2) + " vs bound " + format_double(bound));
    s.check("second_moment_bound", m2 <= 1.05 * bound,
            [&] { return "empirical=" + format_double(m2) + " bound=" + format_double(bound); });
  }

  {
    // Minibatch variance at B and 2B on a noisy linear oracle, where the
    // smoothed gradient is exactly a and E L^2 = ||a||^2 + sigma^2 d.
    const Eigen::Index d = 6;
    const Vector a = normal_vector(rng, d);
    const double sigma = 0.5;
    const NoisyLinearOracle oracle(a, sigma);
    const double G2 = a.squaredNorm() + sigma * sigma * static_cast<double>(d);
    GradEstimatorConfig cfg;
    cfg.delta = 0.01;
    const Vector x = normal_vector(rng, d);
    const std::uint64_t B = 8;
    const std::uint64_t reps = std::max<std::uint64_t>(N / (3 * B), 4000);
    auto variance = [&](std::uint64_t batch) {
      double acc = 0.0;
      for (std::uint64_t r = 0; r < reps; ++r) {
        acc += (minibatch_gradient(oracle, x, cfg, batch, rng).vector - a).squaredNorm();
      }
      return acc / static_cast<double>(reps);
    };
    const double v1 = variance(B);
    const double v2 = variance(2 * B);
    const double bound = c16 * static_cast<double>(d) * G2 / static_cast<double>(B);
    s.note("batch variance: B=" + std::to_string(B) + " " + format_double(v1) + ", B=" +
           std::to_string(2 * B) + " " + format_double(v2) + ", bound " + format_double(bound));
    s.check("batch_variance_bound", v1 <= 1.10 * bound,
            [&] { return "variance=" + format_double(v1) + " bound=" + format_double(bound); });
    s.check("batch_variance_halves", std::abs(v1 / v2 - 2.0) <= 0.4,
            [&] { return "ratio=" + format_double(v1 / v2); });
  }

  {
    // Smoothing sandwich on |x| and ||x - c||_1.
    const std::uint64_t points = std::min<std::uint64_t>(100, N);
    const std::uint64_t M = std::max<std::uint64_t>(N / points, 100);
    for (std::uint64_t k = 0; k < points; ++k) {
      const Eigen::Index d = k % 2 ? 4 : 1;
      const AbsSumOracle oracle(normal_vector(rng, d));
      const double G = std::sqrt(static_cast<double>(d));
      const double delta = k % 4 < 2 ? 0.01 : 0.1;
      const Vector x = normal_vector(rng, d, 0.5);
      const MeanEstimate est = smoothed_value_estimate(oracle, x, delta, M, rng);
      const double fx = oracle.evaluate(x, 0);
      s.check("smoothing_sandwich", std::abs(est.mean - fx) <= delta * G * (1.0 + 1e-12) + 3.0 * est.std_error, [&] {
        return "d=" + std::to_string(d) + " delta=" + format_double(delta) + " x=" + vec_str(x) +
               " estimate=" + format_double(est.mean) + " f=" + format_double(fx);
      });
    }
  }

  {
    // Epoch starts of the variance-reduced estimator equal plain minibatches.
    const Eigen::Index d = 4;
    const AbsSumOracle oracle(normal_vector(rng, d));
    GradEstimatorConfig g2;
    g2.option = EstimatorOption::G2;
    g2.delta = 0.05;
    g2.batch_B0 = 64;
    g2.batch_B1 = 8;
    g2.period_q = 3;
    GradientEstimator est(g2);
    RngStream stream = rng.split(77);
    Vector x = normal_vector(rng, d);
    for (std::uint64_t t = 0; t < 7; ++t) {
      RngStream copy = stream;
      const GradientEstimate got = est.next(oracle, x, stream);
      if (t % g2.period_q == 0) {
        const GradientEstimate ref = minibatch_gradient(oracle, x, g2, g2.batch_B0, copy);
        s.check("epoch_start_matches_minibatch", got.vector == ref.vector,
                [&] { return "t=" + std::to_string(t); });
      }
      x -= 0.1 * got.vector;
    }
  }

  {
    // Reported fevals against an instrumented oracle.
    for (const auto option : {EstimatorOption::G1, EstimatorOption::G2}) {
      const auto counter = std::make_shared<CountingOracle>(
          std::make_shared<AbsSumOracle>(Vector::Zero(3)));
      ProblemSpec p;
      p.dim = 3;
      p.oracle = counter;
      p.regularizer = std::make_shared<ElasticNet>(0.1, 0.1);
      RunConfig cfg;
      cfg.estimator.option = option;
      cfg.estimator.batch_B = 5;
      cfg.estimator.batch_B0 = 7;
      cfg.estimator.batch_B1 = 2;
      cfg.estimator.period_q = 4;
      cfg.steps_T = 11;
      cfg.gamma = 0.05;
      cfg.objective_every = 0;
      const RunTrace tr = run(p, cfg, Vector::Ones(3), rng);
      const std::uint64_t reported = tr.records.back().cum_fevals;
      s.check("feval_accounting", reported == counter->count() &&
                                      reported == fevals_for_schedule(cfg.estimator, cfg.steps_T),
              [&] {
                return "reported=" + std::to_string(reported) +
                       " counted=" + std::to_string(counter->count());
              });
    }
  }
}

void suite_metrics(Suite& s, std::uint64_t trials, RngStream& rng) {
  for (std::uint64_t k = 0; k < trials; ++k) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(6));
    const auto h = random_regularizer(rng, d, 1.0, static_cast<int>(k));
    const double gamma = std::exp(uniform_in(rng, std::log(0.01), std::log(10.0)));
    const Vector x = normal_vector(rng, d);
    const Vector g = normal_vector(rng, d);
    const Vector g2 = normal_vector(rng, d);

    const Vector m1 = gradient_mapping(x, g, gamma, *h);
    const Vector m2 = gradient_mapping(x, g2, gamma, *h);
    s.check("mapping_contraction", (m2 - m1).norm() <= (g2 - g).norm() + 1e-10, [&] {
      return h->name() + " gamma=" + format_double(gamma) + " x=" + vec_str(x) +
             " g=" + vec_str(g) + " g'=" + vec_str(g2);
    });

    // Evaluate at a feasible point so h(x) is finite for indicators.
    const Vector xf = reg_prox(*h, x, 1.0);
    const Vector mf = gradient_mapping(xf, g, gamma, *h);
    const Vector p = reg_prox(*h, xf - gamma * g, gamma);
    const double lhs = g.dot(mf);
    const double rhs = mf.squaredNorm() + (h->value(p) - h->value(xf)) / gamma;
    s.check("mapping_inner_product", lhs >= rhs - 1e-10, [&] {
      return h->name() + " gamma=" + format_double(gamma) + " x=" + vec_str(xf) +
             " g=" + vec_str(g) + " lhs=" + format_double(lhs) + " rhs=" + format_double(rhs);
    });

    const Vector step = prox_step(xf, g, gamma, *h);
    const double scale = 1.0 + xf.norm();
    s.check("prox_step_identity", (step - (xf - gamma * mf)).norm() <= 1e-12 * scale,
            [&] { return h->name() + " gamma=" + format_double(gamma) + " x=" + vec_str(xf); });

    const auto* l1 = dynamic_cast<const L1Norm*>(h.get());
    const Vector gl = l1 ? Vector(g.cwiseMax(-l1->lambda1()).cwiseMin(l1->lambda1())) : g;
    const double gap = fw_gap(xf, gl, *h);
    s.check("fw_gap_nonnegative", gap >= -1e-12, [&] {
      return h->name() + " x=" + vec_str(xf) + " g=" + vec_str(gl) + " gap=" + format_double(gap);
    });
  }
}

void suite_gcg_feasibility(Suite& s, std::uint64_t trials, RngStream& rng) {
  for (std::uint64_t k = 0; k < trials; ++k) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(5));
    const bool ball = k % 2 == 0;
    const double L = 1.0;
    ProblemSpec p;
    p.dim = d;
    p.oracle = std::make_shared<EuclideanNormOracle>(normal_vector(rng, d));
    // Every two-point estimate has norm at most d L, so G = d L keeps each
    // estimate inside the ball where the LMO is provably bounded.
    p.lipschitz_G = static_cast<double>(d) * L;
    if (ball) {
      p.regularizer = std::make_shared<BallIndicator>(normal_vector(rng, d), uniform_in(rng, 0.5, 3.0));
    } else {
      p.regularizer =
          std::make_shared<ElasticNet>(uniform_in(rng, 0.01, 0.5), uniform_in(rng, 0.1, 2.0));
    }
    const AnchorRadius ar = reg_anchor_radius(*p.regularizer, p.lipschitz_G, d);

    RunConfig cfg;
    cfg.algorithm = Algorithm::GCG;
    cfg.estimator.delta = uniform_in(rng, 0.01, 0.2);
    cfg.estimator.batch_B = 1 + rng.uniform_index(8);
    if (ball && k % 4 == 0) {
      cfg.estimator.option = EstimatorOption::G2;
      cfg.estimator.batch_B0 = 8;
      cfg.estimator.batch_B1 = 2;
      cfg.estimator.period_q = 3;
    }
    cfg.steps_T = 30;
    cfg.gamma = uniform_in(rng, 0.01, 1.0);
    cfg.objective_every = 0;
    cfg.seed = k;
    const Vector x0 = point_in_ball(rng, ar.anchor, ar.radius);
    const RunTrace tr = run(p, cfg, x0, rng);

    for (std::uint64_t t = 0; t <= tr.steps(); ++t) {
      const double dist = (tr.iterate(t) - ar.anchor).norm();
      s.check("gcg_iterates_within_radius", dist <= ar.radius + 1e-9, [&] {
        return p.regularizer->name() + " d=" + std::to_string(d) + " t=" + std::to_string(t) +
               " dist=" + format_double(dist) + " R=" + format_double(ar.radius);
      });
    }
  }
}

}  // namespace

bool ProptestResult::ok() const {
  for (const auto& i : invariants) {
    if (i.violated) return false;
  }
  return true;
}

const std::vector<std::string>& proptest_suites() {
  static const std::vector<std::string> names = {"prox",    "lmo",             "estimator",
                                                 "metrics", "gcg_feasibility", "all"};
  return names;
}

ProptestResult run_proptest(const std::string& suite, std::uint64_t trials, std::uint64_t seed,
                            std::ostream& log) {
  using Fn = void (*)(Suite&, std::uint64_t, RngStream&);
  const std::vector<std::pair<std::string, Fn>> table = {
      {"prox", suite_prox},
      {"lmo", suite_lmo},
      {"estimator", suite_estimator},
      {"metrics", suite_metrics},
      {"gcg_feasibility", suite_gcg_feasibility},
  };
  ProptestResult result;
  bool found = false;
  RngStream root(seed);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (suite != "all" && suite != table[i].first) continue;
    found = true;
    log << "suite " << table[i].first << "\n";
    Suite s(log);
    RngStream rng = root.split(i);
    table[i].second(s, trials, rng);
    s.report(result);
  }
  if (!found) throw InvalidArgument("unknown proptest suite '" + suite + "'");
  return result;
}

}  // namespace zoc
