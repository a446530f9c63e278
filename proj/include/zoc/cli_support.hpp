#pragma once

#include "zoc/optimizers.hpp"
#include "zoc/relu_bench.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zoc::cli {

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

class UnknownKey : public Error {
 public:
  explicit UnknownKey(const std::string& what) : Error("UnknownKey", what) {}
};

/// Everything needed to build a problem and run one optimizer on it.
struct ExperimentConfig {
  std::string problem = "relu";  // relu | robust_regression
  std::string regularizer = "elastic_net";  // elastic_net | ball
  double lambda1 = bench::kLambda1;
  double lambda2 = bench::kLambda2;
  double radius = 1.0;  // ball regularizer
  std::uint64_t n_train = bench::kSamples;
  Eigen::Index dim = 10;  // robust_regression
  double init_scale = 0.1;
  std::optional<double> lipschitz_G;
  RunConfig run;
};

/// Flat `key = value` parser. Blank lines and `#` comments are skipped.
/// Keys: algorithm, option, T, gamma, delta, batch, batch_b0, batch_b1,
/// period_q, lambda1, lambda2, seed, metric_every, metric_batch, delta0,
/// objective_every, workers, init_scale, n_train, problem, regularizer,
/// radius, dim, lipschitz_G.
class ConfigParser {
 public:
  ConfigParser() = default;
  /// Starts from a complete configuration (e.g. a bench preset).
  explicit ConfigParser(ExperimentConfig base);

  /// Applies one assignment; `where` prefixes error messages.
  void set(const std::string& key, const std::string& value, const std::string& where = "");
  void parse_text(const std::string& text, const std::string& source = "config");
  void parse_file(const std::string& path);
  /// Cross-key checks, then the finished configuration.
  ExperimentConfig finish() const;

 private:
  ExperimentConfig cfg_;
  std::map<std::string, std::string> seen_;  // key -> location
};

ExperimentConfig parse_config(const std::string& path);

/// The four configurations of the ReLU benchmark, keyed pgd_g1, pgd_g2,
/// gcg_g1, gcg_g2.
std::vector<std::pair<std::string, ExperimentConfig>> bench_configs(std::uint64_t seed);

struct TraceRow {
  std::uint64_t step = 0;
  std::uint64_t cum_fevals = 0;
  std::optional<double> objective;
  std::optional<double> train_acc;
  std::optional<double> test_acc;
  std::optional<double> metric;

  bool operator==(const TraceRow&) const = default;
};

struct TraceTable {
  bool with_accuracy = false;
  std::vector<TraceRow> rows;
};

void write_trace_csv(std::ostream& os, const TraceTable& table);
TraceTable read_trace_csv(std::istream& is);

struct ExperimentResult {
  RunTrace trace;
  TraceTable table;
  std::optional<double> final_train_acc;
  std::optional<double> final_test_acc;
};

/// Builds the problem from the seed (dataset, then x0), runs, and tabulates.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// One JSON object per line describing the hyperparameters.
std::string hyperparams_json(const TheoremHyperParams& hp);
std::string hyperparams_csv(const TheoremHyperParams& hp);

}  // namespace zoc::cli
