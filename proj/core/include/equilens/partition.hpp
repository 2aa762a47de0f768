#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace equilens {

// A set partition of {0, ..., m-1}, stored as a restricted-growth string:
// label(0) = 0 and label(i) <= 1 + max(label(0..i-1)). Two positions share a
// block exactly when their labels agree.
class Partition {
 public:
  Partition() = default;

  // Throws InputError unless `labels` is a restricted-growth string.
  static Partition from_labels(std::vector<int> labels);
  // Canonical partition induced by equal entries of `indices`.
  static Partition equality_pattern(std::span<const std::size_t> indices);

  std::size_t size() const { return labels_.size(); }
  std::size_t block_count() const;
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  // Blocks in label order, each listing its positions ascending.
  std::vector<std::vector<std::size_t>> blocks() const;

  // 1-based set notation, e.g. "{{1,2},{3}}".
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  explicit Partition(std::vector<int> labels) : labels_(std::move(labels)) {}
  std::vector<int> labels_;
};

inline constexpr int kMaxPartitionSize = 4;

// All set partitions of an m-element set in lexicographic restricted-growth
// order, 1 <= m <= 4.
std::vector<Partition> enumerate_partitions(int m);

std::size_t bell_number(int m);

}  // namespace equilens
