// Invariant suites run through the same entry point as `zoc proptest`.

#include "zoc/proptest.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace {

void expect_suite(const std::string& suite, std::uint64_t trials, std::uint64_t seed) {
  std::ostringstream log;
  const auto res = zoc::run_proptest(suite, trials, seed, log);
  EXPECT_TRUE(res.ok()) << log.str();
  EXPECT_FALSE(res.invariants.empty());
  for (const auto& inv : res.invariants) EXPECT_GT(inv.checked, 0u) << inv.name;
}

}  // namespace

TEST(Properties, Prox) {
  for (std::uint64_t s : {1, 2, 3}) expect_suite("prox", 1000, s);
}

TEST(Properties, Lmo) {
  for (std::uint64_t s : {1, 2, 3}) expect_suite("lmo", 1000, s);
}

TEST(Properties, Metrics) {
  for (std::uint64_t s : {1, 2, 3}) expect_suite("metrics", 1000, s);
}

TEST(Properties, GcgFeasibility) { expect_suite("gcg_feasibility", 100, 4); }

TEST(Properties, Estimator) { expect_suite("estimator", 100000, 5); }
