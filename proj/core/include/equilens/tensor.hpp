#pragma once

#include <cstddef>
#include <vector>

#include "equilens/group.hpp"

namespace equilens {

// Dense node tensor of order 1 (n positions) or 2 (n*n positions, row-major)
// with `channels` values per position, channels innermost.
struct NodeTensor {
  int order = 1;
  std::size_t n = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  static NodeTensor zeros(int order, std::size_t n, std::size_t channels);

  std::size_t positions() const { return order == 1 ? n : n * n; }
  double& at(std::size_t position, std::size_t channel) { return data[position * channels + channel]; }
  double at(std::size_t position, std::size_t channel) const {
    return data[position * channels + channel];
  }

  bool same_shape(const NodeTensor& other) const {
    return order == other.order && n == other.n && channels == other.channels;
  }
};

// Acts on every node axis: order 1 moves position i to p(i); order 2 moves
// (i, j) to (p(i), p(j)).
NodeTensor permute(const NodeTensor& x, const Permutation& p);

// Concatenates channels of tensors with equal order and n.
NodeTensor concat_channels(const NodeTensor& a, const NodeTensor& b);

// Throws DimensionError with `what` when shapes differ.
void require_shape(const NodeTensor& x, int order, std::size_t n, std::size_t channels,
                   const char* what);

}  // namespace equilens
