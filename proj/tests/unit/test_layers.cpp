#include <gtest/gtest.h>

#include "equilens/equivariant_layer.hpp"
#include "equilens/error.hpp"
#include "oracles.hpp"

using namespace equilens;

namespace {

NodeTensor random_tensor(int order, std::size_t n, std::size_t channels, std::mt19937_64& rng) {
  auto x = NodeTensor::zeros(order, n, channels);
  std::normal_distribution<double> normal;
  for (double& v : x.data) v = normal(rng);
  return x;
}

EquivariantLayer random_layer(int k, int l, std::size_t d_in, std::size_t d_out, std::mt19937_64& rng) {
  EquivariantLayer layer(k, l, d_in, d_out);
  std::normal_distribution<double> normal;
  for (double& w : layer.weights) w = normal(rng);
  for (double& b : layer.bias) b = normal(rng);
  return layer;
}

std::vector<std::vector<int>> library_order(int m) {
  std::vector<std::vector<int>> out;
  for (const auto& p : enumerate_partitions(m)) out.emplace_back(p.labels().begin(), p.labels().end());
  return out;
}

double max_abs_diff(const NodeTensor& a, const NodeTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST(BasisOperator, SupportsPartitionAllIndexPairs) {
  for (int k = 1; k <= 2; ++k) {
    for (int l = 1; l <= 2; ++l) {
      const auto& op = BasisOperator::get(k, l, 5);
      std::size_t total = 0;
      for (std::size_t g = 0; g < op.partitions().size(); ++g) total += op.support(g).size();
      EXPECT_EQ(total, op.in_positions() * op.out_positions());
      EXPECT_EQ(op.partitions().size(), oracle::bell(k + l));
    }
  }
}

TEST(BasisOperator, ScaleIsOneOverMatchedInputs) {
  // Order 2 -> 1 at n = 5: pattern {0,1,2} (i, j, out all distinct) sums
  // (n-1)(n-2) = 12 inputs per output.
  const auto& op = BasisOperator::get(2, 1, 5);
  const auto& parts = op.partitions();
  for (std::size_t g = 0; g < parts.size(); ++g) {
    if (parts[g] == Partition::from_labels({0, 1, 2})) EXPECT_DOUBLE_EQ(op.scale(g), 1.0 / 12.0);
    if (parts[g] == Partition::from_labels({0, 0, 0})) EXPECT_DOUBLE_EQ(op.scale(g), 1.0);
  }
}

TEST(BasisOperator, RejectsDegenerateSizes) {
  EXPECT_THROW(BasisOperator::get(2, 2, 3), InputError);
  EXPECT_THROW(BasisOperator::get(1, 1, kMaxNodes + 1), InputError);
  EXPECT_THROW(BasisOperator::get(3, 1, 6), InputError);
}

TEST(BasisApply, SumsExactlyMatchingInputs) {
  std::mt19937_64 rng(2);
  const std::size_t n = 4;
  const auto x = random_tensor(2, n, 1, rng);
  for (const auto& gamma : enumerate_partitions(3)) {
    const auto y = basis_apply(gamma, x);
    const std::vector<int> labels(gamma.labels().begin(), gamma.labels().end());
    for (std::size_t out = 0; out < n; ++out) {
      double expect = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (oracle::pattern_of({i, j, out}) == labels) expect += x.at(i * n + j, 0);
        }
      }
      EXPECT_NEAR(y.at(out, 0), expect, 1e-12) << gamma.to_string();
    }
  }
}

TEST(EquivariantLayer, ForwardMatchesDenseDefinition) {
  std::mt19937_64 rng(5);
  for (int k = 1; k <= 2; ++k) {
    for (int l = 1; l <= 2; ++l) {
      for (std::size_t n : {4u, 5u}) {
        const auto layer = random_layer(k, l, 2, 3, rng);
        const auto x = random_tensor(k, n, 2, rng);
        const auto expect = oracle::dense_layer(library_order(k + l), layer.weights, layer.bias, 3, x, l);
        EXPECT_LT(max_abs_diff(layer.forward(x), expect), 1e-11) << k << "->" << l << " n=" << n;
      }
    }
  }
}

TEST(EquivariantLayer, CommutesWithPermutations) {
  std::mt19937_64 rng(6);
  for (int k = 1; k <= 2; ++k) {
    for (int l = 1; l <= 2; ++l) {
      const auto layer = random_layer(k, l, 3, 2, rng);
      for (int trial = 0; trial < 20; ++trial) {
        const auto p = oracle::random_perm(6, rng);
        const auto x = random_tensor(k, 6, 3, rng);
        const auto lhs = layer.forward(oracle::permute_tensor(x, p));
        const auto rhs = oracle::permute_tensor(layer.forward(x), p);
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
      }
    }
  }
}

TEST(EquivariantLayer, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int k = 1; k <= 2; ++k) {
    for (int l = 1; l <= 2; ++l) {
      auto layer = random_layer(k, l, 2, 2, rng);
      const auto x = random_tensor(k, 4, 2, rng);
      const auto r = random_tensor(l, 4, 2, rng);  // loss = <r, y>
      EquivariantLayer grad(k, l, 2, 2);
      const auto dx = layer.backward(x, r, grad);

      auto loss_w = [&](const std::vector<double>& w) {
        auto copy = layer;
        copy.weights = w;
        const auto y = copy.forward(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * r.data[i];
        return s;
      };
      EXPECT_LT(oracle::rel_error(grad.weights, oracle::numeric_gradient(loss_w, layer.weights)), 1e-7);

      auto loss_b = [&](const std::vector<double>& b) {
        auto copy = layer;
        copy.bias = b;
        const auto y = copy.forward(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * r.data[i];
        return s;
      };
      EXPECT_LT(oracle::rel_error(grad.bias, oracle::numeric_gradient(loss_b, layer.bias)), 1e-7);

      auto loss_x = [&](const std::vector<double>& v) {
        auto xx = x;
        xx.data = v;
        const auto y = layer.forward(xx);
        double s = 0.0;
        for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * r.data[i];
        return s;
      };
      EXPECT_LT(oracle::rel_error(dx.data, oracle::numeric_gradient(loss_x, x.data)), 1e-7);
    }
  }
}

TEST(EquivariantLayer, ZeroWeightsGiveTheBiasPattern) {
  EquivariantLayer layer(2, 2, 1, 1);
  layer.bias = {2.0, -1.0};
  std::mt19937_64 rng(1);
  const auto y = layer.forward(random_tensor(2, 4, 1, rng));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(y.at(i * 4 + j, 0), i == j ? 2.0 : -1.0);
  }
}

TEST(EquivariantLayer, RejectsWrongInputShape) {
  EquivariantLayer layer(1, 2, 2, 2);
  std::mt19937_64 rng(1);
  EXPECT_THROW(layer.forward(random_tensor(2, 4, 2, rng)), DimensionError);
  EXPECT_THROW(layer.forward(random_tensor(1, 4, 3, rng)), DimensionError);
}

TEST(HybridLayer, ConcatenatesNodeAndEdgeParts) {
  std::mt19937_64 rng(8);
  HybridLayer layer(3, 2, 2, 4);
  layer.node_part = random_layer(1, 2, 3, 2, rng);
  layer.edge_part = random_layer(2, 2, 2, 4, rng);
  const auto nodes = random_tensor(1, 5, 3, rng);
  const auto edges = random_tensor(2, 5, 2, rng);
  const auto y = layer.forward(nodes, edges);
  const auto a = layer.node_part.forward(nodes);
  const auto b = layer.edge_part.forward(edges);
  ASSERT_EQ(y.channels, 6u);
  for (std::size_t pos = 0; pos < y.positions(); ++pos) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(y.at(pos, c), a.at(pos, c));
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(y.at(pos, 2 + c), b.at(pos, c));
  }
  const auto p = oracle::random_perm(5, rng);
  const auto moved = layer.forward(oracle::permute_tensor(nodes, p), oracle::permute_tensor(edges, p));
  EXPECT_LT(max_abs_diff(moved, oracle::permute_tensor(y, p)), 1e-12);
}
