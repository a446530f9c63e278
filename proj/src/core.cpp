#include "zoc/core.hpp"

#include "zoc/regularizer.hpp"

#include <cmath>
#include <string>

namespace zoc {

void check_dim(const Vector& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(x.size()));
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::split(std::uint64_t key) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() { return std::generate_canonical<double, 53>(engine_); }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double oracle_eval(const StochasticOracle& oracle, const Vector& x, SampleToken xi) {
  check_dim(x, oracle.dim(), "oracle_eval");
  return oracle.evaluate(x, xi);
}

void validate_problem(const ProblemSpec& spec, std::optional<Algorithm> algorithm) {
  if (spec.dim < 1) throw InvalidProblem("dim: must be >= 1");
  if (!spec.oracle) throw InvalidProblem("oracle: missing");
  if (spec.oracle->dim() != spec.dim) throw InvalidProblem("dim: oracle dimension mismatch");
  if (!spec.regularizer) throw InvalidProblem("regularizer: missing");
  if (!(spec.lipschitz_G > 0.0) || !std::isfinite(spec.lipschitz_G)) {
    throw InvalidProblem("lipschitz_G: must be positive and finite");
  }
  if (!(spec.smoothing_c > 0.0) || !std::isfinite(spec.smoothing_c)) {
    throw InvalidProblem("smoothing_c: must be positive and finite");
  }
  if (auto fixed = spec.regularizer->fixed_dim(); fixed && *fixed != spec.dim) {
    throw InvalidProblem("regularizer: dimension " + std::to_string(*fixed) +
                         " does not match problem dimension " + std::to_string(spec.dim));
  }

  AnchorRadius ar;
  try {
    ar = spec.regularizer->anchor_radius(spec.lipschitz_G, spec.dim);
  } catch (const NoRadius& e) {
    if (algorithm == Algorithm::GCG) {
      throw InvalidProblem(std::string("growth radius undefined: ") + e.what());
    }
    // PGD does not need R; any point where h is finite serves as anchor.
    return;
  }
  if (!std::isfinite(spec.regularizer->value(ar.anchor))) {
    throw InvalidProblem("regularizer: no feasible anchor (h(anchor) is not finite)");
  }
}

double objective_estimate(const ProblemSpec& problem, const Vector& x,
                          std::uint64_t n_samples, RngStream& rng) {
  if (n_samples < 1) throw InvalidArgument("objective_estimate: n_samples must be >= 1");
  check_dim(x, problem.dim, "objective_estimate");
  const auto& oracle = *problem.oracle;

  double sum = 0.0;
  const auto finite = oracle.finite_size();
  if (finite && *finite == n_samples) {
    for (std::uint64_t i = 0; i < n_samples; ++i) sum += oracle.evaluate(x, i);
  } else {
    for (std::uint64_t i = 0; i < n_samples; ++i) sum += oracle.evaluate(x, oracle.sample(rng));
  }
  return sum / static_cast<double>(n_samples) + problem.regularizer->value(x);
}

}  // namespace zoc
