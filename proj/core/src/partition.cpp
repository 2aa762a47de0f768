#include "equilens/partition.hpp"

#include <algorithm>

#include "equilens/error.hpp"

namespace equilens {

Partition Partition::from_labels(std::vector<int> labels) {
  int max_label = -1;
  for (int label : labels) {
    if (label < 0 || label > max_label + 1) {
      throw InputError("partition labels must form a restricted-growth string");
    }
    max_label = std::max(max_label, label);
  }
  return Partition(std::move(labels));
}

Partition Partition::equality_pattern(std::span<const std::size_t> indices) {
  std::vector<int> labels(indices.size());
  int next = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    labels[i] = -1;
    for (std::size_t j = 0; j < i; ++j) {
      if (indices[j] == indices[i]) {
        labels[i] = labels[j];
        break;
      }
    }
    if (labels[i] < 0) labels[i] = next++;
  }
  return Partition(std::move(labels));
}

std::size_t Partition::block_count() const {
  int max_label = -1;
  for (int label : labels_) max_label = std::max(max_label, label);
  return static_cast<std::size_t>(max_label + 1);
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(block_count());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out[static_cast<std::size_t>(labels_[i])].push_back(i);
  }
  return out;
}

std::string Partition::to_string() const {
  std::string out = "{";
  const auto bs = blocks();
  for (std::size_t b = 0; b < bs.size(); ++b) {
    if (b) out += ',';
    out += '{';
    for (std::size_t k = 0; k < bs[b].size(); ++k) {
      if (k) out += ',';
      out += std::to_string(bs[b][k] + 1);
    }
    out += '}';
  }
  return out + "}";
}

std::vector<Partition> enumerate_partitions(int m) {
  if (m < 1 || m > kMaxPartitionSize) {
    throw InputError("partition size must be in [1, " + std::to_string(kMaxPartitionSize) +
                     "], got " + std::to_string(m));
  }
  std::vector<Partition> out;
  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  // Odometer over restricted-growth strings; labels[0] stays 0.
  while (true) {
    out.push_back(Partition::from_labels(labels));
    int pos = m - 1;
    while (pos > 0) {
      const int prefix_max =
          *std::max_element(labels.begin(), labels.begin() + pos);
      if (labels[static_cast<std::size_t>(pos)] <= prefix_max) {
        ++labels[static_cast<std::size_t>(pos)];
        std::fill(labels.begin() + pos + 1, labels.end(), 0);
        break;
      }
      --pos;
    }
    if (pos == 0) return out;
  }
}

std::size_t bell_number(int m) {
  static constexpr std::size_t kBell[] = {1, 1, 2, 5, 15};
  if (m < 0 || m > kMaxPartitionSize) throw InputError("bell_number supports 0 <= m <= 4");
  return kBell[m];
}

}  // namespace equilens
