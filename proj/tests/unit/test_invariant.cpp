#include <gtest/gtest.h>

#include "equilens/error.hpp"
#include "equilens/invariant.hpp"
#include "oracles.hpp"

using namespace equilens;

TEST(Sort, ReturnsAscendingValuesAndTheSortingPermutation) {
  Vector z(5);
  z << 3, -1, 2, -1, 0;
  const auto r = sort_projection(z);
  Vector expect(5);
  expect << -1, -1, 0, 2, 3;
  EXPECT_TRUE((r.sorted - expect).isZero(0.0));
  EXPECT_TRUE((apply_perm_vector(r.perm, z) - r.sorted).isZero(0.0));
}

TEST(Sort, RejectsNaN) {
  Vector z(2);
  z << 1, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sort_projection(z), InputError);
}

TEST(Sort, IsIdempotentAndExactlyInvariant) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector z = Vector::Random(7);
    const Vector s = sort_projection(z).sorted;
    EXPECT_EQ(sort_projection(s).sorted, s);
    EXPECT_EQ(sort_projection(oracle::permute(z, oracle::random_perm(7, rng))).sorted, s);
  }
}

TEST(Pooling, ComputesSumMeanMaxPerChannel) {
  // Three nodes, two channels, node-major.
  Vector z(6);
  z << 1, 10, 2, 20, 6, -5;
  EXPECT_TRUE((pooling_map(PoolKind::sum, 3, 2).apply(z) - Vector::Map(std::vector<double>{9, 25}.data(), 2)).isZero(0.0));
  EXPECT_TRUE((pooling_map(PoolKind::mean, 3, 2).apply(z) - Vector::Map(std::vector<double>{3, 25.0 / 3}.data(), 2)).isZero(1e-15));
  EXPECT_TRUE((pooling_map(PoolKind::max, 3, 2).apply(z) - Vector::Map(std::vector<double>{6, 20}.data(), 2)).isZero(0.0));
}

TEST(Pooling, IsBitwiseInvariantUnderNodePermutations) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0, 1e3);
  for (auto kind : {PoolKind::sum, PoolKind::mean, PoolKind::max}) {
    const auto map = pooling_map(kind, 6, 1);
    for (int trial = 0; trial < 300; ++trial) {
      Vector z(6);
      for (Eigen::Index i = 0; i < 6; ++i) z(i) = normal(rng);
      EXPECT_EQ(map.apply(oracle::permute(z, oracle::random_perm(6, rng))), map.apply(z));
    }
  }
}

TEST(Reynolds, AveragedMatrixIsInvariantUnderEveryElement) {
  const auto spec = GroupSpec::symmetric(4);
  const auto map = reynolds_random_projection(spec, 8, 5, 3);
  ASSERT_TRUE(map.matrix.has_value());
  for (const auto& g : enumerate_group(spec)) {
    EXPECT_TRUE((*map.matrix * representation_matrix(spec, g, 8) - *map.matrix).isZero(1e-12));
  }
}

TEST(Reynolds, CyclicAveragingKillsNonzeroFrequencies) {
  // Averaging over C_k removes every block whose frequency is not a multiple of k.
  const auto spec = GroupSpec::cyclic(6, {0, 1, 2, 6});
  const auto map = reynolds_random_projection(spec, spec.dimension(), 4, 9);
  const Matrix& m = *map.matrix;
  EXPECT_TRUE(m.middleCols(1, 4).isZero(1e-12));
  EXPECT_FALSE(m.col(0).isZero(1e-3));
  EXPECT_FALSE(m.middleCols(5, 2).isZero(1e-3));
}

TEST(Reynolds, RefusesGroupsAboveTheCap) {
  EXPECT_THROW(reynolds_random_projection(GroupSpec::symmetric(9), 9, 3, 0), CapacityError);
  EXPECT_THROW(reynolds_random_projection(GroupSpec::symmetric(4), 6, 3, 0), DimensionError);
}

TEST(Partition, OrderTwoFunctionalsAreTraceAndOffDiagonalSum) {
  const auto map = partition_invariant_projection(3, 1, 2, 2, 0);
  Vector z(9);
  z << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Vector features(Eigen::Vector2d(15, 30));
  EXPECT_TRUE((map.apply(z) - *map.matrix * features).isZero(1e-12));
}

TEST(Partition, InvariantUnderConjugation) {
  std::mt19937_64 rng(12);
  const auto map = partition_invariant_projection(5, 2, 4, 2, 7);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = NodeTensor::zeros(2, 5, 2);
    for (double& v : x.data) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto moved = oracle::permute_tensor(x, oracle::random_perm(5, rng));
    const Vector a = map.apply(Vector::Map(x.data.data(), 50));
    const Vector b = map.apply(Vector::Map(moved.data.data(), 50));
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BlockNorm, KeepsInvariantCoordinatesAndPairNorms) {
  Vector z(5);
  z << -2, 3, 4, 0, 1;
  const Vector r = block_norm_map(GroupSpec::cyclic(360, {0, 1, 2})).apply(z);
  EXPECT_EQ(r(0), -2);
  EXPECT_DOUBLE_EQ(r(1), 5);
  EXPECT_DOUBLE_EQ(r(2), 1);
  EXPECT_THROW(block_norm_map(GroupSpec::symmetric(3)), InputError);
}

TEST(ApplyMap, ChecksWidthAndFlagsConstantColumns) {
  Matrix rows(3, 4);
  rows << 1, 2, 3, 4, 4, 3, 2, 1, 2, 2, 2, 2;
  const auto out = apply_invariant_map(pooling_map(PoolKind::sum, 4, 1), rows, 2);
  EXPECT_EQ(out.values.rows(), 3);
  EXPECT_EQ(out.values(0, 0), 10);
  EXPECT_EQ(out.warnings.size(), 0u);
  const Matrix same = rows.topRows(2);
  EXPECT_EQ(apply_invariant_map(pooling_map(PoolKind::sum, 4, 1), same).warnings.size(), 1u);
  EXPECT_THROW(apply_invariant_map(sorting_map(5), rows), DimensionError);
}

TEST(ApplyMap, ParallelMatchesSerial) {
  const Matrix rows = Matrix::Random(97, 6);
  const auto map = reynolds_random_projection(GroupSpec::symmetric(6), 6, 3, 1);
  EXPECT_EQ(apply_invariant_map(map, rows, 1).values, apply_invariant_map(map, rows, 4).values);
}

TEST(Kinds, NamesRoundTrip) {
  for (auto kind : {InvariantKind::sort, InvariantKind::reynolds_linear, InvariantKind::partition_basis,
                    InvariantKind::pool_sum, InvariantKind::pool_mean, InvariantKind::pool_max,
                    InvariantKind::block_norm}) {
    EXPECT_EQ(parse_invariant_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_invariant_kind("median"), InputError);
}
