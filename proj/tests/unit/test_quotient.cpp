#include <gtest/gtest.h>

#include <numbers>

#include "equilens/error.hpp"
#include "equilens/invariant.hpp"
#include "equilens/quotient.hpp"
#include "oracles.hpp"

using namespace equilens;

TEST(QuotientSorted, MatchesExhaustiveOrbitSearch) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      Vector a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a(static_cast<Eigen::Index>(i)) = normal(rng);
        b(static_cast<Eigen::Index>(i)) = normal(rng);
      }
      const double expect = oracle::orbit_distance_sym(a, b);
      EXPECT_NEAR(quotient_dist_sorted(a, b).distance, expect, 1e-12);
      EXPECT_NEAR(quotient_dist_bruteforce(a, b, GroupSpec::symmetric(n)).distance, expect, 1e-12);
    }
  }
}

TEST(QuotientSorted, MinimizerAttainsTheDistance) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector a = Vector::Random(6);
    const Vector b = Vector::Random(6);
    for (const auto& q : {quotient_dist_sorted(a, b), quotient_dist_bruteforce(a, b, GroupSpec::symmetric(6))}) {
      const Vector moved = act(GroupSpec::symmetric(6), q.minimizer, b);
      EXPECT_NEAR((a - moved).norm(), q.distance, 1e-12);
    }
  }
}

TEST(QuotientSorted, IsAPseudometricOnLatents) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = Vector::Random(5), b = Vector::Random(5), c = Vector::Random(5);
    const double ab = quotient_dist_sorted(a, b).distance;
    EXPECT_DOUBLE_EQ(ab, quotient_dist_sorted(b, a).distance);
    EXPECT_LE(ab, quotient_dist_sorted(a, c).distance + quotient_dist_sorted(c, b).distance + 1e-12);
    EXPECT_EQ(quotient_dist_sorted(a, oracle::permute(a, oracle::random_perm(5, rng))).distance, 0.0);
  }
}

TEST(QuotientBruteForce, RespectsTheEnumerationCap) {
  const Vector a = Vector::Random(9), b = Vector::Random(9);
  EXPECT_THROW(quotient_dist_bruteforce(a, b, GroupSpec::symmetric(9)), CapacityError);
  EXPECT_NO_THROW(quotient_dist_bruteforce(a, b, GroupSpec::symmetric(9), 400000));
}

TEST(QuotientBruteForce, MultiChannelLatentsMoveNodeRows) {
  // Two nodes with two channels each; swapping nodes aligns them exactly.
  Vector a(4), b(4);
  a << 1, 2, 3, 4;
  b << 3, 4, 1, 2;
  const auto q = quotient_dist_auto(a, b, GroupSpec::symmetric(2));
  EXPECT_EQ(q.method, DistanceMethod::bruteforce);
  EXPECT_NEAR(q.distance, 0.0, 1e-15);
}

TEST(QuotientRotation, MatchesDenseGrid) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  const std::vector<int> freqs{0, 1, 2, 5};
  for (int trial = 0; trial < 20; ++trial) {
    Vector a(7), b(7);
    for (Eigen::Index i = 0; i < 7; ++i) {
      a(i) = normal(rng);
      b(i) = normal(rng);
    }
    const auto q = quotient_dist_rotation(a, b, freqs);
    const double grid = oracle::orbit_distance_rotation_grid(a, b, freqs, 200000);
    EXPECT_LE(q.distance, grid + 1e-12);
    EXPECT_NEAR(q.distance, grid, 1e-6);
    const double theta = std::get<RotationAngle>(q.minimizer).theta;
    EXPECT_NEAR((a - oracle::rotate(b, freqs, theta)).norm(), q.distance, 1e-12);
  }
}

TEST(QuotientRotation, RecoversAKnownRotation) {
  const std::vector<int> freqs{1, 3};
  const Vector b = Vector::Random(4);
  const Vector a = oracle::rotate(b, freqs, 0.9);
  EXPECT_NEAR(quotient_dist_rotation(a, b, freqs).distance, 0.0, 1e-9);
}

TEST(QuotientRotation, OnlyInvariantBlocksGiveEuclideanDistance) {
  Vector a(2), b(2);
  a << 1, 2;
  b << 4, 6;
  EXPECT_DOUBLE_EQ(quotient_dist_rotation(a, b, std::vector<int>{0, 0}).distance, 5.0);
}

TEST(QuotientRotation, RejectsBadShapes) {
  const Vector a = Vector::Random(3), b = Vector::Random(4);
  EXPECT_THROW(quotient_dist_rotation(a, b, std::vector<int>{0, 1}), DimensionError);
  EXPECT_THROW(quotient_dist_rotation(b, b, std::vector<int>{0, 1}), DimensionError);
  EXPECT_THROW(quotient_dist_sorted(a, b), DimensionError);
}

TEST(QuotientAuto, PicksTheSpecializedMethod) {
  const Vector a = Vector::Random(5), b = Vector::Random(5);
  EXPECT_EQ(quotient_dist_auto(a, b, GroupSpec::symmetric(5)).method, DistanceMethod::sorted);
  EXPECT_EQ(quotient_dist_auto(a, b, GroupSpec::cyclic(8, {0, 1, 1})).method, DistanceMethod::rotation_opt);
}
