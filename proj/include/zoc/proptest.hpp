#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace zoc {

struct InvariantOutcome {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t violated = 0;
  std::vector<std::string> counterexamples;  // first few only
};

struct ProptestResult {
  std::vector<InvariantOutcome> invariants;
  bool ok() const;
};

/// prox, lmo, estimator, metrics, gcg_feasibility, all
const std::vector<std::string>& proptest_suites();

/// Runs one invariant suite. `trials` is the number of random instances
/// (Monte-Carlo samples for the estimator suite). Progress and any
/// counterexamples go to `log`. Throws InvalidArgument for unknown suites.
ProptestResult run_proptest(const std::string& suite, std::uint64_t trials, std::uint64_t seed,
                            std::ostream& log);

}  // namespace zoc
