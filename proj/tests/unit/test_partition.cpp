#include <gtest/gtest.h>

#include <set>

#include "equilens/error.hpp"
#include "equilens/partition.hpp"
#include "oracles.hpp"

using namespace equilens;

TEST(Bell, MatchesTriangle) {
  EXPECT_EQ(oracle::bell(2), 2u);
  EXPECT_EQ(oracle::bell(3), 5u);
  EXPECT_EQ(oracle::bell(4), 15u);
  for (int m = 0; m <= kMaxPartitionSize; ++m) EXPECT_EQ(bell_number(m), oracle::bell(m)) << m;
}

TEST(Enumerate, ProducesEveryRestrictedGrowthStringOnce) {
  for (int m = 1; m <= kMaxPartitionSize; ++m) {
    std::set<std::vector<int>> got;
    for (const auto& p : enumerate_partitions(m)) {
      got.insert({p.labels().begin(), p.labels().end()});
    }
    const auto expect = oracle::set_partitions(m);
    EXPECT_EQ(got.size(), enumerate_partitions(m).size());
    EXPECT_EQ(got, std::set<std::vector<int>>(expect.begin(), expect.end()));
  }
  EXPECT_THROW(enumerate_partitions(5), InputError);
}

TEST(EqualityPattern, LabelsByFirstOccurrence) {
  const std::vector<std::size_t> tuple{7, 3, 7, 9};
  const auto p = Partition::equality_pattern(tuple);
  EXPECT_EQ(std::vector<int>(p.labels().begin(), p.labels().end()), (std::vector<int>{0, 1, 0, 2}));
  EXPECT_EQ(p.block_count(), 3u);
  EXPECT_EQ(p.blocks(), (std::vector<std::vector<std::size_t>>{{0, 2}, {1}, {3}}));
}

TEST(FromLabels, AcceptsOnlyRestrictedGrowthStrings) {
  EXPECT_NO_THROW(Partition::from_labels({0, 1, 0, 2}));
  EXPECT_THROW(Partition::from_labels({1, 0}), InputError);
  EXPECT_THROW(Partition::from_labels({0, 2}), InputError);
  EXPECT_EQ(Partition::from_labels({0, 1, 0}).to_string(), "{{1,3},{2}}");
}
