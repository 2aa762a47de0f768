#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "equilens/partition.hpp"
#include "equilens/tensor.hpp"

namespace equilens {

// Nodes per graph supported by the dense layers.
inline constexpr std::size_t kMaxNodes = 12;

// Sparse support of the exact-equality-pattern basis for maps from order-k
// to order-l node tensors on n nodes. For every partition gamma of the k+l
// index slots (input slots first), support(gamma) lists the (input, output)
// position pairs whose combined index tuple has equality pattern exactly
// gamma. The supports of different gammas are disjoint and cover all pairs.
class BasisOperator {
 public:
  struct Entry {
    std::uint32_t in_pos;
    std::uint32_t out_pos;
  };

  // Cached per (k, l, n); safe to call concurrently. Throws InputError when
  // n < k + l (the basis degenerates) or n > kMaxNodes.
  static const BasisOperator& get(int in_order, int out_order, std::size_t n);

  BasisOperator(int in_order, int out_order, std::size_t n);

  int in_order() const { return in_order_; }
  int out_order() const { return out_order_; }
  std::size_t n() const { return n_; }
  std::size_t in_positions() const;
  std::size_t out_positions() const;

  const std::vector<Partition>& partitions() const { return partitions_; }
  std::span<const Entry> support(std::size_t gamma) const { return supports_[gamma]; }
  // 1 / (inputs summed into each output position of gamma's support). The
  // count is the same for every such output position.
  double scale(std::size_t gamma) const { return scales_[gamma]; }

 private:
  int in_order_;
  int out_order_;
  std::size_t n_;
  std::vector<Partition> partitions_;
  std::vector<std::vector<Entry>> supports_;
  std::vector<double> scales_;
};

// Output at j sums x over inputs i whose tuple (i, j) matches gamma exactly;
// applied independently to every channel. The output order is
// gamma.size() - x.order.
NodeTensor basis_apply(const Partition& gamma, const NodeTensor& x);

// Linear permutation-equivariant map from order-k tensors with d_in channels
// to order-l tensors with d_out channels:
//   y[j, o] = sum_{gamma, c} w[gamma, c, o] * s_gamma * B_gamma(x[., c])[j] + sum_beta b[beta, o] * D_beta[j]
// where s_gamma = BasisOperator::scale(gamma), so summing elements act as
// means, and D_beta are the order-l partition patterns (constant for l = 1;
// diagonal and off-diagonal for l = 2).
struct EquivariantLayer {
  int in_order = 1;
  int out_order = 1;
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> weights;  // [gamma][c_in][c_out], gamma in canonical order
  std::vector<double> bias;     // [beta][c_out]

  EquivariantLayer() = default;
  EquivariantLayer(int in_order, int out_order, std::size_t d_in, std::size_t d_out);

  std::size_t basis_size() const;       // b(k + l)
  std::size_t bias_basis_size() const;  // b(l)

  double& weight(std::size_t gamma, std::size_t c_in, std::size_t c_out) {
    return weights[(gamma * d_in + c_in) * d_out + c_out];
  }
  double& bias_at(std::size_t beta, std::size_t c_out) { return bias[beta * d_out + c_out]; }

  NodeTensor forward(const NodeTensor& x) const;
  // Adds parameter gradients into `grad` (same shape) and returns dL/dx.
  NodeTensor backward(const NodeTensor& x, const NodeTensor& grad_out,
                      EquivariantLayer& grad) const;
};

// L_{V,E}: node features through an order 1 -> 2 layer and edge features
// through an order 2 -> 2 layer, concatenated channel-wise (node part first).
struct HybridLayer {
  EquivariantLayer node_part;
  EquivariantLayer edge_part;

  HybridLayer() = default;
  HybridLayer(std::size_t d_node, std::size_t d_edge, std::size_t d_out_node,
              std::size_t d_out_edge);

  std::size_t d_out() const { return node_part.d_out + edge_part.d_out; }

  NodeTensor forward(const NodeTensor& nodes, const NodeTensor& edges) const;
  void backward(const NodeTensor& nodes, const NodeTensor& edges, const NodeTensor& grad_out,
                HybridLayer& grad, NodeTensor* grad_nodes, NodeTensor* grad_edges) const;
};

inline NodeTensor layer_forward(const HybridLayer& layer, const NodeTensor& nodes,
                                const NodeTensor& edges) {
  return layer.forward(nodes, edges);
}

}  // namespace equilens
