#include "test_util.hpp"

#include "zoc/regularizer.hpp"
#include "zoc/relu_bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace zoc;
using namespace zoc::bench;
using zoc::test::vec;

TEST(NetShape, TotalDimension) {
  EXPECT_EQ(NetShape{}.total(), 34);
  EXPECT_EQ((NetShape{2, 3, 2}.total()), 6 + 6 + 3 + 2);
  EXPECT_THROW((NetShape{0, 4, 2}.validate()), InvalidArgument);
}

TEST(GenerateDataset, TeacherSparsityAndSizes) {
  RngStream r(1);
  const BenchData d = generate_dataset(NetShape{}, 1000, r);
  ASSERT_EQ(d.teacher.size(), 34);
  EXPECT_EQ((d.teacher.array() == 0.0).count(), 17);
  EXPECT_EQ(d.train.size(), 1000u);
  EXPECT_EQ(d.test.size(), 1000u);
  EXPECT_EQ(d.train.inputs.rows(), 1000);
  EXPECT_EQ(d.train.inputs.cols(), 5);
}

TEST(GenerateDataset, DeterministicForSeed) {
  RngStream a(7), b(7), c(8);
  const BenchData x = generate_dataset(NetShape{}, 50, a);
  const BenchData y = generate_dataset(NetShape{}, 50, b);
  const BenchData z = generate_dataset(NetShape{}, 50, c);
  EXPECT_EQ(x.teacher, y.teacher);
  EXPECT_EQ(x.train.inputs, y.train.inputs);
  EXPECT_EQ(x.test.labels, y.test.labels);
  EXPECT_NE(x.teacher, z.teacher);
}

TEST(GenerateDataset, ZeroPositionsVaryWithSeed) {
  std::vector<int> hits(34, 0);
  for (int s = 0; s < 200; ++s) {
    RngStream r(s);
    const BenchData d = generate_dataset(NetShape{}, 1, r);
    for (int i = 0; i < 34; ++i) hits[i] += d.teacher[i] == 0.0;
  }
  // Each position is zeroed with probability 1/2.
  for (int h : hits) EXPECT_NEAR(h / 200.0, 0.5, 0.15);
}

TEST(GenerateDataset, TeacherIsPerfect) {
  RngStream r(2);
  const BenchData d = generate_dataset(NetShape{}, 1000, r);
  EXPECT_EQ(accuracy(d.teacher, d.train), 1.0);
  EXPECT_EQ(accuracy(d.teacher, d.test), 1.0);
}

TEST(ReluForward, ZeroParamsGiveZeroLogits) {
  EXPECT_EQ(relu_forward(Vector::Zero(34), NetShape{}, vec({1, 2, 3, 4, 5})), Vector::Zero(2));
}

TEST(ReluForward, DeadUnit) {
  // d_xi = d1 = 1, d2 = 1: W1 = 1, W2 = 1, b1 = 0, b2 = 0.
  EXPECT_EQ(relu_forward(vec({1, 1, 0, 0}), NetShape{1, 1, 1}, vec({-2})), vec({0}));
}

TEST(ReluForward, MatchesHandArithmetic) {
  RngStream r(3);
  const NetShape s{2, 2, 2};
  const Vector p = test::randn(r, s.total());
  const Vector xi = test::randn(r, 2);
  // Layout: W1 row-major (2x2), W2 row-major (2x2), b1, b2.
  double h[2];
  for (int i = 0; i < 2; ++i) {
    h[i] = std::max(0.0, p[2 * i] * xi[0] + p[2 * i + 1] * xi[1] + p[8 + i]);
  }
  double out[2];
  for (int k = 0; k < 2; ++k) out[k] = p[4 + 2 * k] * h[0] + p[4 + 2 * k + 1] * h[1] + p[10 + k];
  const Vector got = relu_forward(p, s, xi);
  EXPECT_NEAR(got[0], out[0], 1e-14);
  EXPECT_NEAR(got[1], out[1], 1e-14);
}

TEST(ReluForward, DimensionChecked) {
  EXPECT_THROW(relu_forward(Vector::Zero(33), NetShape{}, Vector::Zero(5)), DimensionError);
  EXPECT_THROW(relu_forward(Vector::Zero(34), NetShape{}, Vector::Zero(4)), DimensionError);
}

TEST(CrossEntropy, UniformLogits) {
  EXPECT_NEAR(cross_entropy_loss(vec({0, 0}), 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(cross_entropy_loss(vec({0, 0}), 1), std::log(2.0), 1e-15);
}

TEST(CrossEntropy, StableAtLargeMargins) {
  EXPECT_NEAR(cross_entropy_loss(vec({10, -10}), 0), std::log1p(std::exp(-20.0)), 1e-20);
  EXPECT_NEAR(cross_entropy_loss(vec({10, -10}), 1), 20.0 + std::log1p(std::exp(-20.0)), 1e-12);
  EXPECT_NEAR(cross_entropy_loss(vec({1000, -1000}), 1), 2000.0, 1e-9);
}

TEST(CrossEntropy, Errors) {
  EXPECT_THROW(cross_entropy_loss(vec({NAN, 0}), 0), NonFiniteLogits);
  EXPECT_THROW(cross_entropy_loss(vec({0, 0}), 2), InvalidArgument);
  EXPECT_THROW(cross_entropy_loss(vec({0, 0, 0}), 0), DimensionError);
}

TEST(CrossEntropy, NonNegative) {
  RngStream r(4);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_GE(cross_entropy_loss(test::randn(r, 2, 20.0), static_cast<int>(r.uniform_index(2))), 0.0);
  }
}

TEST(Accuracy, ZeroParamsCountLabelOnes) {
  // Equal logits resolve to label 1, the generation rule for ties.
  RngStream r(5);
  const BenchData d = generate_dataset(NetShape{}, 500, r);
  std::uint64_t ones = 0;
  for (int y : d.train.labels) ones += y == 1;
  EXPECT_DOUBLE_EQ(accuracy(Vector::Zero(34), d.train), ones / 500.0);
}

TEST(Accuracy, MatchesIndependentRecount) {
  RngStream r(6);
  const BenchData d = generate_dataset(NetShape{}, 300, r);
  const Vector p = test::randn(r, 34);
  int hits = 0;
  for (Eigen::Index i = 0; i < 300; ++i) {
    const Vector l = relu_forward(p, d.train.shape, d.train.inputs.row(i).transpose());
    hits += (l[0] > l[1] ? 0 : 1) == d.train.labels[i];
  }
  EXPECT_DOUBLE_EQ(accuracy(p, d.train), hits / 300.0);
}

TEST(BenchProblem, ObjectiveDecomposition) {
  RngStream r(7);
  const BenchData d = generate_dataset(NetShape{}, 1000, r);
  const ProblemSpec p = make_bench_problem(std::make_shared<Dataset>(d.train));
  EXPECT_EQ(p.dim, 34);
  EXPECT_NO_THROW(validate_problem(p, Algorithm::GCG));
  const Vector x = test::randn(r, 34, 0.5);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < 1000; ++i) {
    loss += cross_entropy_loss(relu_forward(x, d.train.shape, d.train.inputs.row(i).transpose()),
                               d.train.labels[i]);
  }
  const double expected = loss / 1000 + 0.01 * x.lpNorm<1>() + 0.005 * x.squaredNorm();
  RngStream s(0);
  EXPECT_NEAR(objective_estimate(p, x, 1000, s), expected, 1e-12);
  EXPECT_DOUBLE_EQ(reg_anchor_radius(*p.regularizer, p.lipschitz_G, 34).radius, 200.0);
}

TEST(ReluOracle, IndexOutOfRange) {
  RngStream r(8);
  const BenchData d = generate_dataset(NetShape{}, 10, r);
  ReluOracle o(std::make_shared<Dataset>(d.train));
  EXPECT_THROW(o.evaluate(Vector::Zero(34), 10), InvalidArgument);
  EXPECT_EQ(o.finite_size(), 10u);
}

TEST(DatasetCsv, RoundTrip) {
  RngStream r(9);
  const BenchData d = generate_dataset(NetShape{}, 25, r);
  std::stringstream ss;
  write_dataset_csv(ss, d.train, d.teacher);
  Vector teacher;
  const Dataset back = read_dataset_csv(ss, &teacher);
  EXPECT_EQ(back.inputs, d.train.inputs);
  EXPECT_EQ(back.labels, d.train.labels);
  EXPECT_EQ(back.seed, d.train.seed);
  EXPECT_EQ(teacher, d.teacher);
  EXPECT_EQ(back.shape.total(), 34);
}

TEST(DatasetCsv, MalformedRejected) {
  std::stringstream ss("not a dataset\n");
  EXPECT_THROW(read_dataset_csv(ss), InvalidArgument);
}
