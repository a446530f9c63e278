#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace zoc {

using Vector = Eigen::VectorXd;

/// Opaque sample token. Finite-sum oracles read it as a dataset index,
/// synthetic oracles as a sub-seed.
using SampleToken = std::uint64_t;

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

/// Base of every library error. `kind()` is a stable, greppable name.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define ZOC_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

ZOC_DEFINE_ERROR(DimensionError);
ZOC_DEFINE_ERROR(InvalidArgument);
ZOC_DEFINE_ERROR(InvalidProblem);
ZOC_DEFINE_ERROR(UnboundedLMO);
ZOC_DEFINE_ERROR(NoRadius);
ZOC_DEFINE_ERROR(MissingRadius);
ZOC_DEFINE_ERROR(InfeasiblePoint);
ZOC_DEFINE_ERROR(GCGInfeasibleStart);
ZOC_DEFINE_ERROR(EmptyTrace);
ZOC_DEFINE_ERROR(NonFiniteLogits);

#undef ZOC_DEFINE_ERROR

void check_dim(const Vector& x, Eigen::Index expected, const char* what);

//---------------------------------------------------------------------------//
// RngStream
//---------------------------------------------------------------------------//

/// Seeded random stream. `split(k)` derives a substream whose seed is a
/// SplitMix64 hash of (seed, k), so substreams never share engine state.
class RngStream {
 public:
  using Engine = std::mt19937_64;

  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  RngStream split(std::uint64_t key) const;

  double normal();
  double uniform();  // [0, 1)
  std::uint64_t uniform_index(std::uint64_t n);  // [0, n)
  Engine& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  Engine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

//---------------------------------------------------------------------------//
// Stochastic oracle
//---------------------------------------------------------------------------//

/// Zeroth-order access to f_xi(x). Implementations must be pure in
/// (x, xi) and safe to evaluate concurrently.
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  virtual Eigen::Index dim() const = 0;
  /// f_xi(x); callers guarantee x.size() == dim().
  virtual double evaluate(const Vector& x, SampleToken xi) const = 0;
  /// Draws xi ~ P.
  virtual SampleToken sample(RngStream& rng) const = 0;
  /// Number of samples when P is uniform over a finite index set.
  virtual std::optional<std::uint64_t> finite_size() const { return std::nullopt; }
};

using OraclePtr = std::shared_ptr<const StochasticOracle>;

/// Checked f_xi(x).
double oracle_eval(const StochasticOracle& oracle, const Vector& x, SampleToken xi);

/// Wraps an oracle and counts every evaluation.
class CountingOracle final : public StochasticOracle {
 public:
  explicit CountingOracle(OraclePtr inner) : inner_(std::move(inner)) {}

  Eigen::Index dim() const override { return inner_->dim(); }
  double evaluate(const Vector& x, SampleToken xi) const override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_->evaluate(x, xi);
  }
  SampleToken sample(RngStream& rng) const override { return inner_->sample(rng); }
  std::optional<std::uint64_t> finite_size() const override { return inner_->finite_size(); }

  std::uint64_t count() const noexcept { return count_.load(); }
  void reset() noexcept { count_.store(0); }

 private:
  OraclePtr inner_;
  mutable std::atomic<std::uint64_t> count_{0};
};

//---------------------------------------------------------------------------//
// Problem
//---------------------------------------------------------------------------//

class Regularizer;
using RegularizerPtr = std::shared_ptr<const Regularizer>;

enum class Algorithm { PGD, GCG };

struct ProblemSpec {
  Eigen::Index dim = 0;
  OraclePtr oracle;
  RegularizerPtr regularizer;
  double lipschitz_G = 1.0;
  // Absolute constant in the cG*sqrt(d)/delta gradient-Lipschitz bound of
  // the smoothed function. Unknown in general; 1 is the default.
  double smoothing_c = 1.0;
};

/// Throws InvalidProblem naming the first violated requirement. With
/// `algorithm == GCG` the regularizer must also admit a growth radius.
void validate_problem(const ProblemSpec& spec,
                      std::optional<Algorithm> algorithm = std::nullopt);

/// Monte-Carlo estimate of F(x) + h(x) from `n_samples` draws of xi. For a
/// finite-sum oracle with n_samples equal to its size, every index is
/// visited once in order and the result is exact.
double objective_estimate(const ProblemSpec& problem, const Vector& x,
                          std::uint64_t n_samples, RngStream& rng);

}  // namespace zoc
