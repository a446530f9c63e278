#include "zoc/cli_support.hpp"

#include "zoc/oracles.hpp"
#include "zoc/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace zoc::cli {
namespace {

double positive(const std::string& key, const std::string& v) {
  double x;
  try {
    x = parse_double(v);
  } catch (const InvalidArgument&) {
    throw ParseError(key + " must be a number, got '" + v + "'");
  }
  if (!(x > 0.0) || !std::isfinite(x)) throw ParseError(key + " must be positive");
  return x;
}

double finite(const std::string& key, const std::string& v) {
  double x;
  try {
    x = parse_double(v);
  } catch (const InvalidArgument&) {
    throw ParseError(key + " must be a number, got '" + v + "'");
  }
  if (!std::isfinite(x)) throw ParseError(key + " must be finite");
  return x;
}

std::uint64_t count(const std::string& key, const std::string& v, std::uint64_t min) {
  std::uint64_t x;
  try {
    x = parse_uint(v);
  } catch (const InvalidArgument&) {
    throw ParseError(key + " must be an integer, got '" + v + "'");
  }
  if (x < min) throw ParseError(key + " must be >= " + std::to_string(min));
  return x;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"algorithm",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "pgd") c.run.algorithm = Algorithm::PGD;
         else if (v == "gcg") c.run.algorithm = Algorithm::GCG;
         else throw ParseError(k + " must be pgd or gcg");
       }},
      {"option",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "g1") c.run.estimator.option = EstimatorOption::G1;
         else if (v == "g2") c.run.estimator.option = EstimatorOption::G2;
         else throw ParseError(k + " must be g1 or g2");
       }},
      {"T", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.steps_T = count(k, v, 1);
       }},
      {"gamma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "theorem") c.run.gamma.reset();
         else c.run.gamma = positive(k, v);
       }},
      {"delta", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.delta = positive(k, v);
       }},
      {"batch", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.batch_B = count(k, v, 1);
       }},
      {"batch_b0", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.batch_B0 = count(k, v, 1);
       }},
      {"batch_b1", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.batch_B1 = count(k, v, 1);
       }},
      {"period_q", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.period_q = count(k, v, 1);
       }},
      {"lambda1", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lambda1 = positive(k, v);
       }},
      {"lambda2", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lambda2 = positive(k, v);
       }},
      {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.seed = count(k, v, 0);
       }},
      {"metric_every", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.record_metric_every = count(k, v, 0);
       }},
      {"metric_batch", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.metric_batch_M = count(k, v, 2);
       }},
      {"delta0", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.delta0 = finite(k, v);
       }},
      {"objective_every", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.objective_every = count(k, v, 0);
       }},
      {"workers", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.estimator.workers = static_cast<unsigned>(count(k, v, 1));
       }},
      {"init_scale",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.init_scale = finite(k, v);
         if (c.init_scale < 0.0) throw ParseError(k + " must be nonnegative");
       }},
      {"n_train", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.n_train = count(k, v, 1);
       }},
      {"problem",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v != "relu" && v != "robust_regression") {
           throw ParseError(k + " must be relu or robust_regression");
         }
         c.problem = v;
       }},
      {"regularizer",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v != "elastic_net" && v != "ball") throw ParseError(k + " must be elastic_net or ball");
         c.regularizer = v;
       }},
      {"radius", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.radius = positive(k, v);
       }},
      {"dim", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.dim = static_cast<Eigen::Index>(count(k, v, 1));
       }},
      {"lipschitz_G", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lipschitz_G = positive(k, v);
       }},
  };
  return table;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> parse_cell(const std::string& s) {
  if (trim(s).empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

//---------------------------------------------------------------------------//
// Config
//---------------------------------------------------------------------------//

ConfigParser::ConfigParser(ExperimentConfig base) : cfg_(std::move(base)) {
  for (const char* k : {"period_q", "batch_b0", "batch_b1"}) seen_[k] = "preset";
}

void ConfigParser::set(const std::string& key, const std::string& value, const std::string& where) {
  const auto it = setters().find(key);
  const std::string prefix = where.empty() ? "" : where + ": ";
  if (it == setters().end()) throw UnknownKey(prefix + "unknown key '" + key + "'");
  try {
    it->second(cfg_, key, value);
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  }
  seen_[key] = where;
}

void ConfigParser::parse_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(where + ": empty key");
    if (value.empty()) throw ParseError(where + ": empty value for '" + key + "'");
    set(key, value, where);
  }
}

void ConfigParser::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  parse_text(buf.str(), path);
}

ExperimentConfig ConfigParser::finish() const {
  if (cfg_.run.estimator.option == EstimatorOption::G2) {
    for (const char* k : {"period_q", "batch_b0", "batch_b1"}) {
      if (!seen_.count(k)) throw ParseError(std::string(k) + " required for g2");
    }
  }
  if (cfg_.run.algorithm == Algorithm::GCG && cfg_.run.gamma && *cfg_.run.gamma > 1.0) {
    throw ParseError("gamma must lie in (0, 1] for gcg");
  }
  return cfg_;
}

ExperimentConfig parse_config(const std::string& path) {
  ConfigParser p;
  p.parse_file(path);
  return p.finish();
}

std::vector<std::pair<std::string, ExperimentConfig>> bench_configs(std::uint64_t seed) {
  ExperimentConfig base;
  base.run.seed = seed;
  base.run.estimator.delta = bench::kDelta;

  ExperimentConfig pgd_g1 = base;
  pgd_g1.run.algorithm = Algorithm::PGD;
  pgd_g1.run.estimator.option = EstimatorOption::G1;
  pgd_g1.run.estimator.batch_B = 500;
  pgd_g1.run.steps_T = 100;
  pgd_g1.run.gamma = 0.005;

  ExperimentConfig pgd_g2 = base;
  pgd_g2.run.algorithm = Algorithm::PGD;
  pgd_g2.run.estimator.option = EstimatorOption::G2;
  pgd_g2.run.estimator.batch_B0 = 500;
  pgd_g2.run.estimator.batch_B1 = 50;
  pgd_g2.run.estimator.period_q = 10;
  pgd_g2.run.steps_T = 523;
  pgd_g2.run.gamma = 0.001;

  ExperimentConfig gcg_g1 = pgd_g1;
  gcg_g1.run.algorithm = Algorithm::GCG;
  gcg_g1.run.gamma = 5e-5;

  ExperimentConfig gcg_g2 = pgd_g2;
  gcg_g2.run.algorithm = Algorithm::GCG;
  gcg_g2.run.gamma = 1e-5;

  return {{"pgd_g1", pgd_g1}, {"pgd_g2", pgd_g2}, {"gcg_g1", gcg_g1}, {"gcg_g2", gcg_g2}};
}

//---------------------------------------------------------------------------//
// Trace CSV
//---------------------------------------------------------------------------//

void write_trace_csv(std::ostream& os, const TraceTable& table) {
  os << (table.with_accuracy ? "step,cum_fevals,objective,train_acc,test_acc,metric\n"
                             : "step,cum_fevals,objective,metric\n");
  for (const auto& r : table.rows) {
    os << r.step << ',' << r.cum_fevals << ',' << cell(r.objective) << ',';
    if (table.with_accuracy) os << cell(r.train_acc) << ',' << cell(r.test_acc) << ',';
    os << cell(r.metric) << '\n';
  }
}

TraceTable read_trace_csv(std::istream& is) {
  TraceTable t;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("trace: empty file");
  if (line == "step,cum_fevals,objective,train_acc,test_acc,metric") {
    t.with_accuracy = true;
  } else if (line != "step,cum_fevals,objective,metric") {
    throw ParseError("trace: unexpected header '" + line + "'");
  }
  const std::size_t ncol = t.with_accuracy ? 6 : 4;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const auto c = split(line, ',');
    if (c.size() != ncol) throw ParseError("trace: line " + std::to_string(lineno) + ": wrong column count");
    try {
      TraceRow r;
      r.step = parse_uint(c[0]);
      r.cum_fevals = parse_uint(c[1]);
      r.objective = parse_cell(c[2]);
      if (t.with_accuracy) {
        r.train_acc = parse_cell(c[3]);
        r.test_acc = parse_cell(c[4]);
      }
      r.metric = parse_cell(c.back());
      t.rows.push_back(r);
    } catch (const InvalidArgument& e) {
      throw ParseError("trace: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

//---------------------------------------------------------------------------//
// Experiments
//---------------------------------------------------------------------------//

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  RngStream root(cfg.run.seed);
  RngStream data_rng = root.split(100);
  RngStream init_rng = root.split(101);
  RngStream run_rng = root.split(102);

  ProblemSpec problem;
  std::optional<bench::BenchData> data;
  if (cfg.problem == "relu") {
    data = bench::generate_dataset(bench::NetShape{}, cfg.n_train, data_rng);
    problem = bench::make_bench_problem(std::make_shared<const bench::Dataset>(data->train));
  } else {
    auto oracle = std::make_shared<const RobustRegressionOracle>(
        RobustRegressionOracle::synthetic(cfg.dim, cfg.n_train, data_rng));
    problem.dim = cfg.dim;
    problem.lipschitz_G = oracle->lipschitz_G();
    problem.oracle = std::move(oracle);
  }
  if (cfg.lipschitz_G) problem.lipschitz_G = *cfg.lipschitz_G;
  if (cfg.regularizer == "ball") {
    problem.regularizer = std::make_shared<BallIndicator>(Vector::Zero(problem.dim), cfg.radius);
  } else {
    problem.regularizer = std::make_shared<ElasticNet>(cfg.lambda1, cfg.lambda2);
  }

  Vector x0(problem.dim);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = cfg.init_scale * init_rng.normal();

  ExperimentResult res;
  res.trace = run(problem, cfg.run, x0, run_rng);
  res.table.with_accuracy = data.has_value();
  for (const auto& rec : res.trace.records) {
    TraceRow row;
    row.step = rec.t;
    row.cum_fevals = rec.cum_fevals;
    row.objective = rec.objective;
    row.metric = rec.metric;
    if (data) {
      row.train_acc = bench::accuracy(rec.x, data->train);
      row.test_acc = bench::accuracy(rec.x, data->test);
    }
    res.table.rows.push_back(row);
  }
  if (data && !res.table.rows.empty()) {
    res.final_train_acc = res.table.rows.back().train_acc;
    res.final_test_acc = res.table.rows.back().test_acc;
  }
  return res;
}

std::string hyperparams_json(const TheoremHyperParams& hp) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(hp.kind);
  j["T"] = hp.T;
  j["gamma"] = hp.gamma;
  if (hp.kind == TheoremKind::PGD_G1 || hp.kind == TheoremKind::GCG_G1) {
    j["b"] = hp.B;
  } else {
    j["b0"] = hp.B0;
    j["b1"] = hp.B1;
    j["q"] = hp.q;
  }
  j["predicted_fevals"] = hp.predicted_fevals;
  j["gamma_clamped"] = hp.gamma_clamped;
  return j.dump();
}

std::string hyperparams_csv(const TheoremHyperParams& hp) {
  std::ostringstream os;
  os << "kind,T,gamma,b,b0,b1,q,predicted_fevals\n"
     << to_string(hp.kind) << ',' << hp.T << ',' << format_double(hp.gamma) << ',' << hp.B << ','
     << hp.B0 << ',' << hp.B1 << ',' << hp.q << ',' << hp.predicted_fevals << '\n';
  return os.str();
}

}  // namespace zoc::cli
