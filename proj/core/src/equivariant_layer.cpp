#include "equilens/equivariant_layer.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "equilens/error.hpp"

namespace equilens {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

std::size_t power(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Key of a restricted-growth string of length <= 4 (labels < 4).
std::size_t rgs_key(std::span<const int> labels) {
  std::size_t key = 0;
  for (int label : labels) key = key * 4 + static_cast<std::size_t>(label);
  return key;
}

// Basis images T[j, gamma * d_in + c] = B_gamma(x[., c])[j].
RowMatrix basis_images(const BasisOperator& op, const NodeTensor& x) {
  const std::size_t d_in = x.channels;
  RowMatrix t = RowMatrix::Zero(static_cast<Eigen::Index>(op.out_positions()),
                                static_cast<Eigen::Index>(op.partitions().size() * d_in));
  for (std::size_t g = 0; g < op.partitions().size(); ++g) {
    for (const auto& e : op.support(g)) {
      double* row = t.data() + static_cast<std::size_t>(e.out_pos) * t.cols() + g * d_in;
      const double* src = x.data.data() + static_cast<std::size_t>(e.in_pos) * d_in;
      for (std::size_t c = 0; c < d_in; ++c) row[c] += src[c];
    }
    if (op.scale(g) != 1.0) {
      t.middleCols(static_cast<Eigen::Index>(g * d_in), static_cast<Eigen::Index>(d_in)) *= op.scale(g);
    }
  }
  return t;
}

std::size_t bias_pattern(int out_order, std::size_t n, std::size_t pos) {
  if (out_order == 1) return 0;
  return (pos / n == pos % n) ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// BasisOperator

const BasisOperator& BasisOperator::get(int in_order, int out_order, std::size_t n) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, std::size_t>, std::unique_ptr<BasisOperator>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{in_order, out_order, n}];
  if (!slot) slot = std::make_unique<BasisOperator>(in_order, out_order, n);
  return *slot;
}

BasisOperator::BasisOperator(int in_order, int out_order, std::size_t n)
    : in_order_(in_order), out_order_(out_order), n_(n) {
  if (in_order < 1 || in_order > 2 || out_order < 1 || out_order > 2) {
    throw InputError("equivariant layers support tensor orders 1 and 2");
  }
  const int m = in_order + out_order;
  if (n < static_cast<std::size_t>(m)) {
    throw InputError("basis needs n >= k + l = " + std::to_string(m) + ", got n = " +
                     std::to_string(n));
  }
  if (n > kMaxNodes) {
    throw InputError("dense equivariant layers support at most " + std::to_string(kMaxNodes) +
                     " nodes, got " + std::to_string(n));
  }
  partitions_ = enumerate_partitions(m);
  std::vector<int> index_of(power(4, m), -1);
  for (std::size_t g = 0; g < partitions_.size(); ++g) {
    index_of[rgs_key(partitions_[g].labels())] = static_cast<int>(g);
  }
  supports_.resize(partitions_.size());

  const std::size_t in_count = in_positions();
  const std::size_t out_count = out_positions();
  std::vector<std::size_t> tuple(static_cast<std::size_t>(m));
  for (std::size_t in = 0; in < in_count; ++in) {
    for (std::size_t out = 0; out < out_count; ++out) {
      // Most significant digit first, matching the row-major position layout.
      std::size_t rest = in;
      for (int s = in_order - 1; s >= 0; --s) {
        tuple[static_cast<std::size_t>(s)] = rest % n;
        rest /= n;
      }
      rest = out;
      for (int s = out_order - 1; s >= 0; --s) {
        tuple[static_cast<std::size_t>(in_order + s)] = rest % n;
        rest /= n;
      }
      const auto pattern = Partition::equality_pattern(tuple);
      const int g = index_of[rgs_key(pattern.labels())];
      supports_[static_cast<std::size_t>(g)].push_back(
          {static_cast<std::uint32_t>(in), static_cast<std::uint32_t>(out)});
    }
  }
  scales_.resize(partitions_.size());
  std::vector<char> hit(out_count);
  for (std::size_t g = 0; g < partitions_.size(); ++g) {
    std::fill(hit.begin(), hit.end(), 0);
    std::size_t outputs = 0;
    for (const auto& e : supports_[g]) {
      if (!hit[e.out_pos]) {
        hit[e.out_pos] = 1;
        ++outputs;
      }
    }
    scales_[g] = static_cast<double>(outputs) / static_cast<double>(supports_[g].size());
  }
}

std::size_t BasisOperator::in_positions() const { return power(n_, in_order_); }
std::size_t BasisOperator::out_positions() const { return power(n_, out_order_); }

NodeTensor basis_apply(const Partition& gamma, const NodeTensor& x) {
  const int out_order = static_cast<int>(gamma.size()) - x.order;
  if (out_order < 1 || out_order > 2) {
    throw InputError("partition of size " + std::to_string(gamma.size()) +
                     " does not describe a map from an order-" + std::to_string(x.order) +
                     " tensor to order 1 or 2");
  }
  const auto& op = BasisOperator::get(x.order, out_order, x.n);
  std::size_t g = 0;
  while (g < op.partitions().size() && !(op.partitions()[g] == gamma)) ++g;
  NodeTensor y = NodeTensor::zeros(out_order, x.n, x.channels);
  for (const auto& e : op.support(g)) {
    for (std::size_t c = 0; c < x.channels; ++c) y.at(e.out_pos, c) += x.at(e.in_pos, c);
  }
  return y;
}

// ---------------------------------------------------------------------------
// EquivariantLayer

EquivariantLayer::EquivariantLayer(int in_order_, int out_order_, std::size_t d_in_,
                                   std::size_t d_out_)
    : in_order(in_order_), out_order(out_order_), d_in(d_in_), d_out(d_out_) {
  if (in_order < 1 || in_order > 2 || out_order < 1 || out_order > 2) {
    throw InputError("equivariant layers support tensor orders 1 and 2");
  }
  weights.assign(basis_size() * d_in * d_out, 0.0);
  bias.assign(bias_basis_size() * d_out, 0.0);
}

std::size_t EquivariantLayer::basis_size() const { return bell_number(in_order + out_order); }
std::size_t EquivariantLayer::bias_basis_size() const { return bell_number(out_order); }

NodeTensor EquivariantLayer::forward(const NodeTensor& x) const {
  if (x.order != in_order || x.channels != d_in) {
    throw DimensionError("equivariant layer expects order-" + std::to_string(in_order) +
                         " input with " + std::to_string(d_in) + " channel(s), got order-" +
                         std::to_string(x.order) + " with " + std::to_string(x.channels));
  }
  const auto& op = BasisOperator::get(in_order, out_order, x.n);
  const RowMatrix t = basis_images(op, x);
  NodeTensor y = NodeTensor::zeros(out_order, x.n, d_out);
  RowMap ym(y.data.data(), static_cast<Eigen::Index>(y.positions()),
            static_cast<Eigen::Index>(d_out));
  const ConstRowMap wm(weights.data(), static_cast<Eigen::Index>(basis_size() * d_in),
                       static_cast<Eigen::Index>(d_out));
  ym.noalias() = t * wm;
  for (std::size_t pos = 0; pos < y.positions(); ++pos) {
    const std::size_t beta = bias_pattern(out_order, x.n, pos);
    for (std::size_t o = 0; o < d_out; ++o) y.at(pos, o) += bias[beta * d_out + o];
  }
  return y;
}

NodeTensor EquivariantLayer::backward(const NodeTensor& x, const NodeTensor& grad_out,
                                      EquivariantLayer& grad) const {
  require_shape(grad_out, out_order, x.n, d_out, "equivariant layer backward");
  const auto& op = BasisOperator::get(in_order, out_order, x.n);
  const RowMatrix t = basis_images(op, x);
  const ConstRowMap dy(grad_out.data.data(), static_cast<Eigen::Index>(grad_out.positions()),
                       static_cast<Eigen::Index>(d_out));
  RowMap dw(grad.weights.data(), static_cast<Eigen::Index>(basis_size() * d_in),
            static_cast<Eigen::Index>(d_out));
  dw.noalias() += t.transpose() * dy;
  for (std::size_t pos = 0; pos < grad_out.positions(); ++pos) {
    const std::size_t beta = bias_pattern(out_order, x.n, pos);
    for (std::size_t o = 0; o < d_out; ++o) grad.bias[beta * d_out + o] += grad_out.at(pos, o);
  }

  const ConstRowMap wm(weights.data(), static_cast<Eigen::Index>(basis_size() * d_in),
                       static_cast<Eigen::Index>(d_out));
  const RowMatrix dt = dy * wm.transpose();
  NodeTensor dx = NodeTensor::zeros(in_order, x.n, d_in);
  for (std::size_t g = 0; g < op.partitions().size(); ++g) {
    const double s = op.scale(g);
    for (const auto& e : op.support(g)) {
      const double* src = dt.data() + static_cast<std::size_t>(e.out_pos) * dt.cols() + g * d_in;
      double* dst = dx.data.data() + static_cast<std::size_t>(e.in_pos) * d_in;
      for (std::size_t c = 0; c < d_in; ++c) dst[c] += s * src[c];
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// HybridLayer

HybridLayer::HybridLayer(std::size_t d_node, std::size_t d_edge, std::size_t d_out_node,
                         std::size_t d_out_edge)
    : node_part(1, 2, d_node, d_out_node), edge_part(2, 2, d_edge, d_out_edge) {}

NodeTensor HybridLayer::forward(const NodeTensor& nodes, const NodeTensor& edges) const {
  if (nodes.n != edges.n) throw DimensionError("node and edge tensors disagree on n");
  return concat_channels(node_part.forward(nodes), edge_part.forward(edges));
}

void HybridLayer::backward(const NodeTensor& nodes, const NodeTensor& edges,
                           const NodeTensor& grad_out, HybridLayer& grad, NodeTensor* grad_nodes,
                           NodeTensor* grad_edges) const {
  require_shape(grad_out, 2, nodes.n, d_out(), "hybrid layer backward");
  NodeTensor g_node = NodeTensor::zeros(2, nodes.n, node_part.d_out);
  NodeTensor g_edge = NodeTensor::zeros(2, nodes.n, edge_part.d_out);
  for (std::size_t pos = 0; pos < grad_out.positions(); ++pos) {
    for (std::size_t c = 0; c < node_part.d_out; ++c) g_node.at(pos, c) = grad_out.at(pos, c);
    for (std::size_t c = 0; c < edge_part.d_out; ++c) {
      g_edge.at(pos, c) = grad_out.at(pos, node_part.d_out + c);
    }
  }
  auto dn = node_part.backward(nodes, g_node, grad.node_part);
  auto de = edge_part.backward(edges, g_edge, grad.edge_part);
  if (grad_nodes) *grad_nodes = std::move(dn);
  if (grad_edges) *grad_edges = std::move(de);
}

}  // namespace equilens
