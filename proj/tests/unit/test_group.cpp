#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "equilens/error.hpp"
#include "equilens/group.hpp"
#include "oracles.hpp"

using namespace equilens;

TEST(Permutation, ActionMovesEntryIToImageOfI) {
  const auto p = Permutation::from_image({2, 0, 1});
  Vector z(3);
  z << 10, 20, 30;
  const Vector moved = apply_perm_vector(p, z);
  EXPECT_EQ(moved(2), 10);
  EXPECT_EQ(moved(0), 20);
  EXPECT_EQ(moved(1), 30);
  EXPECT_TRUE((p.matrix() * z - moved).isZero(0.0));
}

TEST(Permutation, CompositionIsALeftAction) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pa = oracle::random_perm(6, rng);
    const auto pb = oracle::random_perm(6, rng);
    const auto a = Permutation::from_image(pa);
    const auto b = Permutation::from_image(pb);
    Vector z = Vector::Random(6);
    EXPECT_TRUE((apply_perm_vector(a * b, z) - apply_perm_vector(a, apply_perm_vector(b, z))).isZero(0.0));
    EXPECT_TRUE((a * a.inverse()).is_identity());
    EXPECT_TRUE((apply_perm_vector(a, z) - oracle::permute(z, pa)).isZero(0.0));
  }
}

TEST(Permutation, RejectsNonBijections) {
  EXPECT_THROW(Permutation::from_image({0, 0, 1}), InputError);
  EXPECT_THROW(Permutation::from_image({0, 3, 1}), InputError);
}

TEST(Permutation, ChannelRowsMoveTogether) {
  const auto p = Permutation::from_image({1, 0});
  Vector z(4);
  z << 1, 2, 3, 4;
  Vector expect(4);
  expect << 3, 4, 1, 2;
  EXPECT_TRUE((apply_perm_rows(p, z, 2) - expect).isZero(0.0));
  EXPECT_THROW(apply_perm_rows(p, z, 3), DimensionError);
}

TEST(GroupSpec, ParseAndPrintRoundTrip) {
  EXPECT_EQ(GroupSpec::parse("sym:6"), GroupSpec::symmetric(6));
  const auto c = GroupSpec::parse("cyc:360:0,1,1,2");
  EXPECT_TRUE(c.is_cyclic());
  EXPECT_EQ(c.degree(), 360u);
  EXPECT_EQ(c.dimension(), 7u);
  EXPECT_EQ(GroupSpec::parse(c.to_string()), c);
  EXPECT_EQ(GroupSpec::parse("cyc:12:f0,f3"), GroupSpec::cyclic(12, {0, 3}));
  for (const char* bad : {"", "sym", "sym:x", "sym:0", "cyc:4", "cyc:4:", "cyc:4:-1", "foo:3"}) {
    EXPECT_THROW(GroupSpec::parse(bad), InputError) << bad;
  }
}

TEST(GroupSpec, OrderOfSymmetricGroup) {
  EXPECT_EQ(*GroupSpec::symmetric(1).order(), 1u);
  EXPECT_EQ(*GroupSpec::symmetric(7).order(), 5040u);
  EXPECT_EQ(*GroupSpec::symmetric(20).order(), 2432902008176640000ULL);
  EXPECT_FALSE(GroupSpec::symmetric(21).order().has_value());
  EXPECT_EQ(*GroupSpec::cyclic(360, {1}).order(), 360u);
}

TEST(GroupSpec, EnumerationIsCompleteAndDistinct) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto elements = enumerate_group(GroupSpec::symmetric(n));
    ASSERT_EQ(elements.size(), *GroupSpec::symmetric(n).order());
    std::set<std::string> seen;
    for (const auto& g : elements) seen.insert(to_string(g));
    EXPECT_EQ(seen.size(), elements.size());
  }
  EXPECT_EQ(enumerate_group(GroupSpec::cyclic(9, {1})).size(), 9u);
  EXPECT_THROW(enumerate_group(GroupSpec::symmetric(9)), CapacityError);
  EXPECT_NO_THROW(enumerate_group(GroupSpec::symmetric(8)));
}

TEST(Rotation, MatchesIndependentFormulaAndIsOrthogonal) {
  const std::vector<int> freqs{0, 1, 2, 3};
  const Vector z = Vector::Random(7);
  for (double theta : {0.0, 0.3, 1.7, -2.5, 6.0}) {
    const Matrix r = rotation_matrix(freqs, theta);
    EXPECT_TRUE((r.transpose() * r - Matrix::Identity(7, 7)).isZero(1e-14));
    EXPECT_TRUE((apply_rotation(freqs, theta, z) - oracle::rotate(z, freqs, theta)).isZero(1e-14));
    EXPECT_TRUE((r * z - oracle::rotate(z, freqs, theta)).isZero(1e-14));
  }
}

TEST(Rotation, CyclicStepsComposeAndInvert) {
  const auto spec = GroupSpec::cyclic(12, {0, 1, 2});
  const Vector z = Vector::Random(5);
  for (std::size_t a = 0; a < 12; ++a) {
    for (std::size_t b = 0; b < 12; ++b) {
      const auto ab = compose(spec, RotationStep{a}, RotationStep{b});
      EXPECT_TRUE((act(spec, ab, z) - act(spec, RotationStep{a}, act(spec, RotationStep{b}, z))).isZero(1e-12));
    }
    const auto inv = inverse(spec, RotationStep{a});
    EXPECT_TRUE((act(spec, inv, act(spec, RotationStep{a}, z)) - z).isZero(1e-12));
  }
  const Vector once = act(spec, RotationStep{1}, z);
  EXPECT_TRUE((once - oracle::rotate(z, {0, 1, 2}, 2.0 * std::numbers::pi / 12.0)).isZero(1e-14));
}

TEST(Representation, MatrixAgreesWithAction) {
  const auto sym = GroupSpec::symmetric(4);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_element(sym, rng);
    const Vector z = Vector::Random(8);
    EXPECT_TRUE((representation_matrix(sym, g, 8) * z - act(sym, g, z)).isZero(0.0));
  }
  const auto cyc = GroupSpec::cyclic(8, {1, 0, 2});
  const Vector z = Vector::Random(5);
  for (std::size_t s = 0; s < 8; ++s) {
    EXPECT_TRUE((representation_matrix(cyc, RotationStep{s}, 5) * z - act(cyc, RotationStep{s}, z)).isZero(1e-14));
  }
}

TEST(Sampling, RandomPermutationsAreUniformOnS3) {
  Rng rng(11);
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[random_permutation(3, rng).to_string()];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [name, count] : counts) EXPECT_NEAR(count, draws / 6.0, 5 * std::sqrt(draws / 6.0)) << name;
}
