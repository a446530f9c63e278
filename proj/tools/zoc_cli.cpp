// zoc: command-line front end.

#include "zoc/cli_support.hpp"
#include "zoc/proptest.hpp"
#include "zoc/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

constexpr const char* kPrecedence =
    "Settings are applied in this order, later ones winning: built-in defaults, "
    "--config file, --set key=value (left to right), --seed.";

class IoError : public zoc::Error {
 public:
  explicit IoError(const std::string& what) : Error("IOError", what) {}
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  if (with_config) cmd->add_option("--config", c.config_path, "Flat key = value config file");
  cmd->add_option("--set", c.overrides, "Override one key (repeatable), e.g. --set T=50");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out_dir, "Output directory for CSV traces")->capture_default_str();
}

zoc::cli::ConfigParser parser_with(const Common& c, const zoc::cli::ExperimentConfig* base) {
  zoc::cli::ConfigParser p = base ? zoc::cli::ConfigParser(*base) : zoc::cli::ConfigParser();
  if (!c.config_path.empty()) p.parse_file(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw zoc::cli::ParseError("--set expects key=value, got '" + kv + "'");
    p.set(std::string(zoc::trim(kv.substr(0, eq))), std::string(zoc::trim(kv.substr(eq + 1))),
          "--set");
  }
  if (c.seed) p.set("seed", std::to_string(*c.seed), "--seed");
  return p;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

void write_table(const fs::path& path, const zoc::cli::TraceTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  zoc::cli::write_trace_csv(os, table);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

void print_summary(const std::string& name, const zoc::cli::ExperimentResult& r,
                   const fs::path& path) {
  std::cout << name << ": steps=" << r.trace.steps()
            << " cum_fevals=" << r.trace.records.back().cum_fevals;
  if (const auto& obj = r.trace.records.back().objective) {
    std::cout << " objective=" << zoc::format_double(*obj);
  }
  if (r.final_train_acc) {
    std::cout << " train_acc=" << zoc::format_double(*r.final_train_acc)
              << " test_acc=" << zoc::format_double(*r.final_test_acc);
  }
  std::cout << " trace=" << path.string() << "\n";
  for (const auto& w : r.trace.warnings) std::cerr << "zoc: warning: " << w << "\n";
}

int cmd_run(const Common& c) {
  const auto cfg = parser_with(c, nullptr).finish();
  const fs::path dir = prepare_out_dir(c.out_dir);
  const auto res = zoc::cli::run_experiment(cfg);
  const fs::path path = dir / "trace.csv";
  write_table(path, res.table);
  print_summary("run", res, path);
  return 0;
}

int cmd_bench(const Common& c, const std::string& only) {
  const fs::path dir = prepare_out_dir(c.out_dir);
  const std::uint64_t seed = c.seed.value_or(0);
  bool any = false;
  for (const auto& [name, base] : zoc::cli::bench_configs(seed)) {
    if (!only.empty() && only != name) continue;
    any = true;
    const auto cfg = parser_with(c, &base).finish();
    const auto res = zoc::cli::run_experiment(cfg);
    const fs::path path = dir / (name + ".csv");
    write_table(path, res.table);
    print_summary(name, res, path);
  }
  if (!any) throw zoc::InvalidArgument("unknown bench configuration '" + only + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order proximal and conditional gradient methods for nonsmooth composite problems"};
  app.footer(kPrecedence);
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run one optimizer and write <out>/trace.csv");
  add_common(run, run_opts, true);

  Common bench_opts;
  std::string only;
  auto* bench = app.add_subcommand(
      "bench", "Run the four ReLU-network benchmark configurations and write <out>/<name>.csv");
  add_common(bench, bench_opts, false);
  bench->add_option("--only", only, "Run a single configuration")
      ->check(CLI::IsMember({"pgd_g1", "pgd_g2", "gcg_g1", "gcg_g2"}));

  std::string kind;
  zoc::TheoremInputs in;
  double R = 0.0;
  std::string format = "csv";
  auto* hyper = app.add_subcommand("hyperparams", "Print theorem hyperparameters");
  hyper->add_option("--kind", kind, "pgd_g1 | pgd_g2 | gcg_g1 | gcg_g2")
      ->required()
      ->check(CLI::IsMember({"pgd_g1", "pgd_g2", "gcg_g1", "gcg_g2"}));
  hyper->add_option("--G", in.G, "Lipschitz constant")->required();
  hyper->add_option("--d", in.d, "Dimension")->required();
  hyper->add_option("--delta", in.delta, "Smoothing radius")->capture_default_str();
  hyper->add_option("--eps", in.epsilon, "Target accuracy")->required();
  auto* r_opt = hyper->add_option("--R", R, "Growth radius (gcg kinds)");
  hyper->add_option("--delta0", in.delta0, "Initial optimality gap")->capture_default_str();
  hyper->add_option("--c", in.c, "Smoothing constant")->capture_default_str();
  hyper->add_option("--format", format, "csv | json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));

  std::string suite;
  std::uint64_t trials = 1000;
  std::uint64_t pt_seed = 0;
  auto* prop = app.add_subcommand("proptest", "Run an invariant suite; exit 0 iff all hold");
  prop->add_option("--suite", suite, "prox | lmo | estimator | metrics | gcg_feasibility | all")
      ->required()
      ->check(CLI::IsMember(zoc::proptest_suites()));
  prop->add_option("--trials", trials, "Random instances per invariant")->capture_default_str();
  prop->add_option("--seed", pt_seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*bench) return cmd_bench(bench_opts, only);
    if (*hyper) {
      if (*r_opt) in.R = R;
      const auto hp = zoc::theorem_hyperparams(zoc::theorem_kind_from_string(kind), in);
      if (hp.gamma_clamped) std::cerr << "zoc: warning: stepsize exceeds 1; clamped to 1\n";
      std::cout << (format == "json" ? zoc::cli::hyperparams_json(hp) + "\n"
                                     : zoc::cli::hyperparams_csv(hp));
      return 0;
    }
    if (*prop) {
      const auto res = zoc::run_proptest(suite, trials, pt_seed, std::cout);
      if (!res.ok()) {
        std::cerr << "zoc: PropertyViolation: suite " << suite << " has failing invariants\n";
        return 1;
      }
      return 0;
    }
  } catch (const zoc::Error& e) {
    std::cerr << "zoc: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zoc: InternalError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
