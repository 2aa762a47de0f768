#include "equilens/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "equilens/error.hpp"
#include "equilens/parallel.hpp"

namespace equilens {

namespace {

void require_dim(const InvariantMap& map, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != map.in_dim) {
    throw DimensionError(to_string(map.kind) + " map expects inputs of length " +
                         std::to_string(map.in_dim) + ", got " + std::to_string(z.size()));
  }
}

Matrix standard_normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = normal(rng);
  }
  return m;
}

std::size_t partition_functional_count(int order) { return order == 1 ? 1 : 2; }

// Invariant functionals per channel, index channel * b(order) + beta.
Vector partition_functionals(const InvariantMap& map, const Vector& z) {
  const std::size_t n = map.group.degree();
  const std::size_t c = map.channels;
  const std::size_t b = partition_functional_count(map.order);
  Vector f = Vector::Zero(static_cast<Eigen::Index>(c * b));
  if (map.order == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        f(static_cast<Eigen::Index>(ch)) += z(static_cast<Eigen::Index>(i * c + ch));
      }
    }
    return f;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t beta = (i == j) ? 0 : 1;
      for (std::size_t ch = 0; ch < c; ++ch) {
        f(static_cast<Eigen::Index>(ch * b + beta)) +=
            z(static_cast<Eigen::Index>((i * n + j) * c + ch));
      }
    }
  }
  return f;
}

// g . z on the input space of `map` (order-2 inputs are conjugated).
Vector act_on_input(const InvariantMap& map, const GroupElement& g, const Vector& z) {
  if (map.kind == InvariantKind::partition_basis && map.order == 2) {
    const auto& p = std::get<Permutation>(g);
    const std::size_t n = p.size();
    const std::size_t c = map.channels;
    Vector out(z.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          out(static_cast<Eigen::Index>((p(i) * n + p(j)) * c + ch)) =
              z(static_cast<Eigen::Index>((i * n + j) * c + ch));
        }
      }
    }
    return out;
  }
  return act(map.group, g, z);
}

}  // namespace

std::string to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::sort:
      return "sort";
    case InvariantKind::reynolds_linear:
      return "reynolds";
    case InvariantKind::partition_basis:
      return "partition";
    case InvariantKind::pool_sum:
      return "pool-sum";
    case InvariantKind::pool_mean:
      return "pool-mean";
    case InvariantKind::pool_max:
      return "pool-max";
    case InvariantKind::block_norm:
      return "block-norm";
  }
  return "unknown";
}

InvariantKind parse_invariant_kind(std::string_view text) {
  for (auto kind : {InvariantKind::sort, InvariantKind::reynolds_linear,
                    InvariantKind::partition_basis, InvariantKind::pool_sum,
                    InvariantKind::pool_mean, InvariantKind::pool_max, InvariantKind::block_norm}) {
    if (to_string(kind) == text) return kind;
  }
  throw InputError("unknown projection kind '" + std::string(text) + "'");
}

SortResult sort_projection(const Vector& z) {
  const auto n = static_cast<std::size_t>(z.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(z(static_cast<Eigen::Index>(i)))) {
      throw InputError("cannot sort a latent with a NaN entry at index " + std::to_string(i));
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return z(static_cast<Eigen::Index>(a)) < z(static_cast<Eigen::Index>(b));
  });
  std::vector<std::size_t> image(n);
  Vector sorted(z.size());
  for (std::size_t rank = 0; rank < n; ++rank) {
    image[order[rank]] = rank;
    sorted(static_cast<Eigen::Index>(rank)) = z(static_cast<Eigen::Index>(order[rank]));
  }
  return {std::move(sorted), Permutation::from_image(std::move(image))};
}

std::size_t default_projection_dim(std::size_t in_dim) { return std::min<std::size_t>(in_dim, 32); }

InvariantMap sorting_map(std::size_t dim) {
  InvariantMap map;
  map.kind = InvariantKind::sort;
  map.group = GroupSpec::symmetric(std::max<std::size_t>(dim, 1));
  map.in_dim = dim;
  map.out_dim = dim;
  return map;
}

InvariantMap pooling_map(PoolKind kind, std::size_t n, std::size_t channels) {
  if (n == 0 || channels == 0) throw InputError("pooling needs at least one node and channel");
  InvariantMap map;
  map.kind = kind == PoolKind::sum    ? InvariantKind::pool_sum
             : kind == PoolKind::mean ? InvariantKind::pool_mean
                                      : InvariantKind::pool_max;
  map.group = GroupSpec::symmetric(n);
  map.in_dim = n * channels;
  map.out_dim = channels;
  map.channels = channels;
  return map;
}

InvariantMap block_norm_map(const GroupSpec& cyclic_spec) {
  if (!cyclic_spec.is_cyclic()) throw InputError("block-norm features need a cyclic group spec");
  InvariantMap map;
  map.kind = InvariantKind::block_norm;
  map.group = cyclic_spec;
  map.in_dim = cyclic_spec.dimension();
  map.out_dim = cyclic_spec.frequencies().size();
  return map;
}

InvariantMap reynolds_random_projection(const GroupSpec& spec, std::size_t in_dim,
                                        std::size_t out_dim, std::uint64_t seed) {
  if (out_dim == 0) throw InputError("projection needs out_dim >= 1");
  const auto order = spec.order();
  if (!order || *order > kDefaultEnumerationCap) {
    throw CapacityError("Reynolds averaging over " + spec.to_string() +
                        " exceeds the enumeration cap; use the partition kind for large "
                        "symmetric groups");
  }
  if (spec.is_cyclic() && in_dim != spec.dimension()) {
    throw DimensionError("input dimension " + std::to_string(in_dim) + " does not match " +
                         spec.to_string());
  }
  if (spec.is_symmetric() && (in_dim == 0 || in_dim % spec.degree() != 0)) {
    throw DimensionError("input dimension " + std::to_string(in_dim) +
                         " is not a multiple of n for " + spec.to_string());
  }

  const Matrix w = standard_normal_matrix(out_dim, in_dim, seed);
  Matrix sum = Matrix::Zero(w.rows(), w.cols());
  if (spec.is_symmetric()) {
    const std::size_t channels = in_dim / spec.degree();
    for_each_element(spec, [&](const GroupElement& g) {
      const auto& p = std::get<Permutation>(g);
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
          sum.col(static_cast<Eigen::Index>(i * channels + c)) +=
              w.col(static_cast<Eigen::Index>(p(i) * channels + c));
        }
      }
    });
  } else {
    for_each_element(spec, [&](const GroupElement& g) {
      sum += w * rotation_block_matrix(spec, std::get<RotationStep>(g).step);
    });
  }

  InvariantMap map;
  map.kind = InvariantKind::reynolds_linear;
  map.group = spec;
  map.in_dim = in_dim;
  map.out_dim = out_dim;
  map.seed = seed;
  map.matrix = sum / static_cast<double>(*order);
  return map;
}

InvariantMap partition_invariant_projection(std::size_t n, std::size_t channels_in,
                                            std::size_t out_dim, int order,
                                            std::uint64_t seed) {
  if (order != 1 && order != 2) {
    throw InputError("partition projection supports tensor order 1 or 2, got " +
                     std::to_string(order));
  }
  if (out_dim == 0) throw InputError("projection needs out_dim >= 1");
  if (n == 0 || channels_in == 0) throw InputError("partition projection needs n, channels >= 1");
  InvariantMap map;
  map.kind = InvariantKind::partition_basis;
  map.group = GroupSpec::symmetric(n);
  map.order = order;
  map.channels = channels_in;
  map.in_dim = (order == 1 ? n : n * n) * channels_in;
  map.out_dim = out_dim;
  map.seed = seed;
  map.matrix = standard_normal_matrix(out_dim, channels_in * partition_functional_count(order), seed);
  return map;
}

Vector pool(const Matrix& per_node, PoolKind kind) {
  if (per_node.rows() == 0 || per_node.cols() == 0) throw InputError("cannot pool an empty input");
  if (!per_node.allFinite()) throw InputError("cannot pool non-finite values");
  Vector out(per_node.cols());
  std::vector<double> column(static_cast<std::size_t>(per_node.rows()));
  for (Eigen::Index c = 0; c < per_node.cols(); ++c) {
    // Summing in sorted order makes sum and mean exactly permutation invariant.
    for (Eigen::Index r = 0; r < per_node.rows(); ++r) column[static_cast<std::size_t>(r)] = per_node(r, c);
    std::sort(column.begin(), column.end());
    double total = 0.0;
    for (double v : column) total += v;
    switch (kind) {
      case PoolKind::sum:
        out(c) = total;
        break;
      case PoolKind::mean:
        out(c) = total / static_cast<double>(column.size());
        break;
      case PoolKind::max:
        out(c) = column.back();
        break;
    }
  }
  return out;
}

Vector pool(const Vector& z, PoolKind kind) {
  const Matrix column = z;
  return pool(column, kind);
}

Vector block_norms(std::span<const int> frequencies, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != frequency_layout_dimension(frequencies)) {
    throw DimensionError("latent length does not match the frequency layout");
  }
  Vector out(static_cast<Eigen::Index>(frequencies.size()));
  Eigen::Index offset = 0;
  for (std::size_t b = 0; b < frequencies.size(); ++b) {
    if (frequencies[b] == 0) {
      out(static_cast<Eigen::Index>(b)) = z(offset);
      offset += 1;
    } else {
      out(static_cast<Eigen::Index>(b)) = std::hypot(z(offset), z(offset + 1));
      offset += 2;
    }
  }
  return out;
}

Vector InvariantMap::apply(const Vector& z) const {
  require_dim(*this, z);
  switch (kind) {
    case InvariantKind::sort:
      return sort_projection(z).sorted;
    case InvariantKind::reynolds_linear:
      return *matrix * z;
    case InvariantKind::partition_basis:
      return *matrix * partition_functionals(*this, z);
    case InvariantKind::pool_sum:
    case InvariantKind::pool_mean:
    case InvariantKind::pool_max: {
      const auto n = static_cast<Eigen::Index>(group.degree());
      const auto c = static_cast<Eigen::Index>(channels);
      // Node-major storage is the row-major n x c matrix.
      const Matrix per_node =
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              z.data(), n, c);
      const PoolKind pk = kind == InvariantKind::pool_sum    ? PoolKind::sum
                          : kind == InvariantKind::pool_mean ? PoolKind::mean
                                                             : PoolKind::max;
      return pool(per_node, pk);
    }
    case InvariantKind::block_norm:
      return block_norms(group.frequencies(), z);
  }
  throw InputError("unknown invariant map kind");
}

ProjectedDataset apply_invariant_map(const InvariantMap& map, const Matrix& rows,
                                     std::size_t threads) {
  if (static_cast<std::size_t>(rows.cols()) != map.in_dim) {
    throw DimensionError(to_string(map.kind) + " map expects " + std::to_string(map.in_dim) +
                         " columns, dataset has " + std::to_string(rows.cols()));
  }
  ProjectedDataset result;
  result.values = Matrix(rows.rows(), static_cast<Eigen::Index>(map.out_dim));
  parallel_for(static_cast<std::size_t>(rows.rows()), threads, [&](std::size_t r) {
    const auto i = static_cast<Eigen::Index>(r);
    result.values.row(i) = map.apply(rows.row(i).transpose()).transpose();
  });

  if (rows.rows() > 0) {
    const Vector first = rows.row(0).transpose();
    const Vector reference = result.values.row(0).transpose();
    Rng rng(map.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int trial = 0; trial < 3; ++trial) {
      const auto g = random_element(map.group, rng);
      const Vector moved = map.apply(act_on_input(map, g, first));
      const double scale = 1.0 + reference.cwiseAbs().maxCoeff();
      if ((moved - reference).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw Error(to_string(map.kind) + " map is not invariant under " +
                    map.group.to_string() + " on the first row");
      }
    }
  }

  if (rows.rows() >= 2) {
    std::size_t constant_columns = 0;
    for (Eigen::Index c = 0; c < result.values.cols(); ++c) {
      const auto col = result.values.col(c);
      if (col.maxCoeff() == col.minCoeff()) ++constant_columns;
    }
    if (constant_columns > 0) {
      result.warnings.push_back(std::to_string(constant_columns) + " of " +
                                std::to_string(result.values.cols()) +
                                " output column(s) have zero variance");
    }
  }
  return result;
}

}  // namespace equilens
