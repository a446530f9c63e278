#include "zoc/cli_support.hpp"
#include "zoc/proptest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace zoc;
using namespace zoc::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  ConfigParser p;
  p.parse_text(text);
  return p.finish();
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind() + ": " + e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Exec {
  int code;
  std::string out;
  std::string err;
};

Exec zoc_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("zoc_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path out = dir / ("o" + std::to_string(counter));
  const fs::path err = dir / ("e" + std::to_string(counter++));
  const std::string cmd = std::string(ZOC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("zoc_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(ConfigParser, BenchDefaultFileAccepted) {
  const auto cfg = parse(
      "# bench default\n"
      "algorithm = pgd\noption = g1\nT = 100\ngamma = 0.005\ndelta = 0.001\nbatch = 500\n");
  EXPECT_EQ(cfg.run.algorithm, Algorithm::PGD);
  EXPECT_EQ(cfg.run.estimator.option, EstimatorOption::G1);
  EXPECT_EQ(cfg.run.steps_T, 100u);
  EXPECT_EQ(cfg.run.gamma, 0.005);
  EXPECT_EQ(cfg.run.estimator.delta, 0.001);
  EXPECT_EQ(cfg.run.estimator.batch_B, 500u);
}

TEST(ConfigParser, NegativeGammaRejectedWithLine) {
  const std::string e = parse_error("T = 3\n\ngamma=-1\n");
  EXPECT_NE(e.find("ParseError"), std::string::npos);
  EXPECT_NE(e.find("gamma must be positive"), std::string::npos);
  EXPECT_NE(e.find(":3"), std::string::npos);
}

TEST(ConfigParser, G2NeedsPeriod) {
  EXPECT_NE(parse_error("option = g2\nbatch_b0 = 5\nbatch_b1 = 2\n").find("period_q required for g2"),
            std::string::npos);
  EXPECT_NO_THROW(parse("option = g2\nbatch_b0 = 5\nbatch_b1 = 2\nperiod_q = 3\n"));
}

TEST(ConfigParser, UnknownKeyIsHardError) {
  EXPECT_NE(parse_error("batchsize = 5\n").find("UnknownKey"), std::string::npos);
}

TEST(ConfigParser, MalformedLines) {
  EXPECT_NE(parse_error("T 5\n").find("ParseError"), std::string::npos);
  EXPECT_NE(parse_error("T = five\n").find("ParseError"), std::string::npos);
  EXPECT_NE(parse_error("algorithm = sgd\n").find("ParseError"), std::string::npos);
  EXPECT_NE(parse_error("T = 0\n").find("ParseError"), std::string::npos);
  EXPECT_NE(parse_error("algorithm = gcg\ngamma = 2\n").find("ParseError"), std::string::npos);
}

TEST(ConfigParser, TheoremGammaAndOverrides) {
  ConfigParser p;
  p.parse_text("gamma = 0.1\nseed = 3\n");
  p.set("gamma", "theorem");
  p.set("seed", "9");
  const auto cfg = p.finish();
  EXPECT_FALSE(cfg.run.gamma.has_value());
  EXPECT_EQ(cfg.run.seed, 9u);
}

TEST(ConfigParser, MissingFile) {
  EXPECT_THROW(parse_config("/nonexistent/zoc.cfg"), ParseError);
}

TEST(BenchConfigs, FourPresets) {
  const auto cs = bench_configs(5);
  ASSERT_EQ(cs.size(), 4u);
  EXPECT_EQ(cs[0].first, "pgd_g1");
  EXPECT_EQ(cs[0].second.run.gamma, 0.005);
  EXPECT_EQ(cs[1].second.run.steps_T, 523u);
  EXPECT_EQ(cs[1].second.run.estimator.period_q, 10u);
  EXPECT_EQ(cs[1].second.run.estimator.batch_B0, 500u);
  EXPECT_EQ(cs[1].second.run.estimator.batch_B1, 50u);
  EXPECT_EQ(cs[2].second.run.gamma, 5e-5);
  EXPECT_EQ(cs[3].second.run.gamma, 1e-5);
  for (const auto& [name, c] : cs) {
    EXPECT_EQ(c.run.seed, 5u);
    EXPECT_EQ(c.run.estimator.delta, 0.001);
  }
}

TEST(TraceCsv, RoundTripExact) {
  TraceTable t;
  t.with_accuracy = true;
  t.rows.push_back({1, 1000, 0.1 + 0.2, 0.5, 0.25, std::nullopt});
  t.rows.push_back({2, 2000, 1.0 / 3.0, 0.75, 1.0, 1e-300});
  t.rows.push_back({3, 3000, std::nullopt, std::nullopt, std::nullopt, 5.0});
  std::stringstream ss;
  write_trace_csv(ss, t);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "step,cum_fevals,objective,train_acc,test_acc,metric");
  const TraceTable back = read_trace_csv(ss);
  EXPECT_TRUE(back.with_accuracy);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(TraceCsv, PlainModeHeader) {
  TraceTable t;
  t.rows.push_back({1, 4, 2.5, std::nullopt, std::nullopt, std::nullopt});
  std::stringstream ss;
  write_trace_csv(ss, t);
  EXPECT_EQ(ss.str(), "step,cum_fevals,objective,metric\n1,4,2.5,\n");
  EXPECT_EQ(read_trace_csv(ss).rows, t.rows);
}

TEST(TraceCsv, BadInputRejected) {
  std::stringstream a("x,y\n");
  EXPECT_THROW(read_trace_csv(a), ParseError);
  std::stringstream b("step,cum_fevals,objective,metric\n1,2\n");
  EXPECT_THROW(read_trace_csv(b), ParseError);
}

TEST(RunExperiment, RoundTripsThroughCsv) {
  auto cfg = bench_configs(1)[0].second;
  cfg.run.steps_T = 5;
  cfg.run.estimator.batch_B = 20;
  cfg.run.record_metric_every = 2;
  cfg.run.metric_batch_M = 20;
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.table.rows.size(), 5u);
  EXPECT_TRUE(res.table.rows[1].metric.has_value());
  EXPECT_FALSE(res.table.rows[0].metric.has_value());
  std::stringstream ss;
  write_trace_csv(ss, res.table);
  EXPECT_EQ(read_trace_csv(ss).rows, res.table.rows);
}

TEST(RunExperiment, RobustRegressionProblem) {
  ConfigParser p;
  p.parse_text("problem = robust_regression\ndim = 4\nn_train = 200\nT = 20\ngamma = 0.05\nbatch = 10\n"
               "delta = 0.01\nalgorithm = gcg\nregularizer = ball\nradius = 2\ninit_scale = 0.1\n");
  const auto res = run_experiment(p.finish());
  EXPECT_FALSE(res.table.with_accuracy);
  EXPECT_EQ(res.table.rows.size(), 20u);
  for (const auto& rec : res.trace.records) EXPECT_LE(rec.x.norm(), 2.0 + 1e-9);
}

TEST(Hyperparams, JsonAndCsv) {
  TheoremInputs in;
  in.G = 1;
  in.d = 4;
  in.R = 1.0;
  in.epsilon = 1;
  const auto hp = theorem_hyperparams(TheoremKind::GCG_G2, in);
  const std::string j = hyperparams_json(hp);
  EXPECT_NE(j.find("\"b0\":2704"), std::string::npos);
  EXPECT_NE(j.find("\"b1\":52"), std::string::npos);
  const std::string c = hyperparams_csv(hp);
  EXPECT_EQ(c.substr(0, c.find('\n')), "kind,T,gamma,b,b0,b1,q,predicted_fevals");
  EXPECT_NE(c.find(",2704,52,52,"), std::string::npos);
}

TEST(Proptest, UnknownSuiteThrows) {
  std::stringstream log;
  EXPECT_THROW(run_proptest("bogus", 10, 0, log), InvalidArgument);
}

// Binary-level checks.

TEST(CliBinary, BenchPgdG1HasHundredRows) {
  const fs::path dir = temp_dir("bench1");
  const Exec e = zoc_cli("bench --only pgd_g1 --seed 0 --out " + dir.string());
  ASSERT_EQ(e.code, 0) << e.err;
  std::ifstream in(dir / "pgd_g1.csv");
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "step,cum_fevals,objective,train_acc,test_acc,metric");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 100);
}

TEST(CliBinary, BenchGcgG2HasRowsAndIsReproducible) {
  const fs::path a = temp_dir("bench2a"), b = temp_dir("bench2b");
  ASSERT_EQ(zoc_cli("bench --only gcg_g2 --seed 3 --out " + a.string()).code, 0);
  ASSERT_EQ(zoc_cli("bench --only gcg_g2 --seed 3 --out " + b.string()).code, 0);
  const std::string x = slurp(a / "gcg_g2.csv"), y = slurp(b / "gcg_g2.csv");
  EXPECT_EQ(x, y);
  std::stringstream ss(x);
  EXPECT_EQ(read_trace_csv(ss).rows.size(), 523u);
}

TEST(CliBinary, RunWithConfigAndOverrides) {
  const fs::path dir = temp_dir("run1");
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "algorithm = pgd\noption = g1\nT = 100\ngamma = 0.005\ndelta = 0.001\nbatch = 500\n";
  }
  const Exec e = zoc_cli("run --config " + (dir / "c.cfg").string() + " --set T=7 --set batch=10 --out " +
                         (dir / "out").string());
  ASSERT_EQ(e.code, 0) << e.err;
  std::ifstream in(dir / "out" / "trace.csv");
  const TraceTable t = read_trace_csv(in);
  EXPECT_EQ(t.rows.size(), 7u);
  EXPECT_EQ(t.rows.back().cum_fevals, 140u);
}

TEST(CliBinary, ErrorsAreSingleLineWithPrefix) {
  const fs::path dir = temp_dir("run2");
  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "T = 5\ngamma = -1\n";
  }
  const Exec e = zoc_cli("run --config " + (dir / "bad.cfg").string() + " --out " + dir.string());
  EXPECT_NE(e.code, 0);
  EXPECT_EQ(e.err.rfind("zoc: ParseError: ", 0), 0u) << e.err;
  EXPECT_EQ(std::count(e.err.begin(), e.err.end(), '\n'), 1);

  const Exec u = zoc_cli("run --set nonsense=1 --out " + dir.string());
  EXPECT_NE(u.code, 0);
  EXPECT_EQ(u.err.rfind("zoc: UnknownKey: ", 0), 0u) << u.err;
}

TEST(CliBinary, Hyperparams) {
  const Exec e = zoc_cli("hyperparams --kind pgd_g2 --G 1 --d 100 --eps 0.1");
  ASSERT_EQ(e.code, 0);
  EXPECT_NE(e.out.find(",17640000,4200,4200,"), std::string::npos) << e.out;

  const Exec j = zoc_cli("hyperparams --kind gcg_g2 --G 1 --d 4 --R 1 --eps 1 --format json");
  ASSERT_EQ(j.code, 0);
  EXPECT_NE(j.out.find("\"b0\":2704"), std::string::npos);

  const Exec m = zoc_cli("hyperparams --kind gcg_g1 --G 1 --d 4 --eps 1");
  EXPECT_NE(m.code, 0);
  EXPECT_EQ(m.err.rfind("zoc: MissingRadius: ", 0), 0u) << m.err;
}

TEST(CliBinary, Proptest) {
  EXPECT_EQ(zoc_cli("proptest --suite prox --trials 1000 --seed 1").code, 0);
  const Exec est = zoc_cli("proptest --suite estimator --trials 100000 --seed 2");
  EXPECT_EQ(est.code, 0) << est.out;
  EXPECT_NE(est.out.find("second moment: empirical"), std::string::npos);
  const Exec bogus = zoc_cli("proptest --suite bogus");
  EXPECT_NE(bogus.code, 0);
  EXPECT_NE(bogus.err.find("bogus"), std::string::npos);
}

TEST(CliBinary, HelpDocumentsPrecedence) {
  const Exec e = zoc_cli("--help");
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("later ones winning"), std::string::npos);
}
