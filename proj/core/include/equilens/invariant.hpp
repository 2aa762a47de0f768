#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equilens/group.hpp"

namespace equilens {

// s(z) = sigma_z . z with sigma_z the stable sorting permutation.
struct SortResult {
  Vector sorted;     // ascending
  Permutation perm;  // apply_perm_vector(perm, input) == sorted
};

// Throws InputError on NaN entries.
SortResult sort_projection(const Vector& z);

enum class InvariantKind {
  sort,
  reynolds_linear,
  partition_basis,
  pool_sum,
  pool_mean,
  pool_max,
  // Per-frequency-block magnitudes of a rotation layout. Nonlinear; frequency
  // 0 blocks are passed through unchanged.
  block_norm,
};

std::string to_string(InvariantKind kind);
InvariantKind parse_invariant_kind(std::string_view text);

enum class PoolKind { sum, mean, max };

// A realized invariant projection s: Z -> Z_s. Use the factory functions
// below; `apply` enforces the input dimension.
struct InvariantMap {
  InvariantKind kind = InvariantKind::sort;
  GroupSpec group = GroupSpec::symmetric(1);
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::uint64_t seed = 0;
  // Linear kinds only. Reynolds: out_dim x in_dim acting on z. Partition:
  // out_dim x (channels * b(order)) acting on the invariant functionals.
  std::optional<Matrix> matrix;
  int order = 1;             // partition kind: tensor order of the input
  std::size_t channels = 1;  // node-major channel count for pooling/partition

  Vector apply(const Vector& z) const;
};

std::size_t default_projection_dim(std::size_t in_dim);

InvariantMap sorting_map(std::size_t dim);
// Pools the node axis of a node-major layout of n rows and `channels` columns.
InvariantMap pooling_map(PoolKind kind, std::size_t n, std::size_t channels);
InvariantMap block_norm_map(const GroupSpec& cyclic_spec);

// M = (1/|G|) sum_g W rho(g) with W i.i.d. standard normal (out_dim x in_dim)
// drawn from `seed`. Refuses groups above the enumeration cap.
InvariantMap reynolds_random_projection(const GroupSpec& spec, std::size_t in_dim,
                                        std::size_t out_dim, std::uint64_t seed);

// Random combinations of the permutation-invariant functionals of an order-1
// (coordinate sum) or order-2 (diagonal sum, off-diagonal sum) node tensor
// with `channels_in` channels. Input layout is node-major with channels last.
InvariantMap partition_invariant_projection(std::size_t n, std::size_t channels_in,
                                            std::size_t out_dim, int order,
                                            std::uint64_t seed);

// Reduces the node axis: rows of `per_node` are nodes.
Vector pool(const Matrix& per_node, PoolKind kind);
Vector pool(const Vector& z, PoolKind kind);

Vector block_norms(std::span<const int> frequencies, const Vector& z);

struct ProjectedDataset {
  Matrix values;
  std::vector<std::string> warnings;
};

// Applies `map` to every row. When the group is enumerable, the first row
// is spot-checked for invariance against a few seeded group elements.
// Rows are processed independently, so any thread count gives identical
// output.
ProjectedDataset apply_invariant_map(const InvariantMap& map, const Matrix& rows,
                                     std::size_t threads = 1);

}  // namespace equilens
