#include "equilens/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "equilens/error.hpp"
#include "equilens/invariant.hpp"
#include "equilens/parallel.hpp"

namespace equilens {

// ---------------------------------------------------------------------------
// PCA

PcaModel pca_fit(const Matrix& data) {
  if (data.rows() < 3 || data.cols() < 2) {
    throw InputError("PCA needs at least 3 rows and 2 columns, got " +
                     std::to_string(data.rows()) + " x " + std::to_string(data.cols()));
  }
  if (!data.allFinite()) throw InputError("PCA input contains non-finite values");
  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - model.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
  const Eigen::Index d = cov.rows();
  model.components.resize(d, 2);
  model.explained_variance.resize(2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    // Eigenvalues come in ascending order.
    Vector v = solver.eigenvectors().col(d - 1 - c);
    Eigen::Index largest = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(v(i)) > std::abs(v(largest))) largest = i;
    }
    if (v(largest) < 0.0) v = -v;
    model.components.col(c) = v;
    model.explained_variance(c) = std::max(0.0, solver.eigenvalues()(d - 1 - c));
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& data) {
  if (data.cols() != model.mean.size()) {
    throw DimensionError("PCA model expects " + std::to_string(model.mean.size()) +
                         " columns, got " + std::to_string(data.cols()));
  }
  return (data.rowwise() - model.mean.transpose()) * model.components;
}

// ---------------------------------------------------------------------------
// kNN

namespace {

void check_knn_inputs(const Matrix& train, std::size_t train_count, const Matrix& test,
                      std::size_t test_count, std::span<const std::size_t> k_values) {
  if (train.rows() == 0 || test.rows() == 0) throw InputError("kNN needs non-empty train and test sets");
  if (train.cols() != test.cols()) {
    throw DimensionError("train and test latents differ in width (" +
                         std::to_string(train.cols()) + " vs " + std::to_string(test.cols()) + ")");
  }
  if (static_cast<std::size_t>(train.rows()) != train_count ||
      static_cast<std::size_t>(test.rows()) != test_count) {
    throw DimensionError("kNN targets do not match the number of latent rows");
  }
  if (k_values.empty()) throw InputError("kNN needs at least one k");
  for (std::size_t k : k_values) {
    if (k == 0 || k > train_count) {
      throw InputError("k = " + std::to_string(k) + " must be in [1, " +
                       std::to_string(train_count) + "]");
    }
  }
}

}  // namespace

std::vector<std::size_t> nearest_neighbors(const Matrix& train, const Vector& query,
                                           std::size_t k) {
  const auto rows = static_cast<std::size_t>(train.rows());
  k = std::min(k, rows);
  std::vector<double> dist(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    dist[i] = (train.row(static_cast<Eigen::Index>(i)).transpose() - query).squaredNorm();
  }
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  order.resize(k);
  return order;
}

std::vector<double> knn_regress_eval(const Matrix& train, std::span<const double> train_props,
                                     const Matrix& test, std::span<const double> test_props,
                                     std::span<const std::size_t> k_values, std::size_t threads) {
  check_knn_inputs(train, train_props.size(), test, test_props.size(), k_values);
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
  const auto queries = static_cast<std::size_t>(test.rows());
  // errors[q][ki]
  std::vector<std::vector<double>> errors(queries);
  parallel_for(queries, threads, [&](std::size_t q) {
    const auto nn = nearest_neighbors(train, test.row(static_cast<Eigen::Index>(q)).transpose(), k_max);
    errors[q].resize(k_values.size());
    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k_values[ki]; ++j) sum += train_props[nn[j]];
      errors[q][ki] = std::abs(sum / static_cast<double>(k_values[ki]) - test_props[q]);
    }
  });
  std::vector<double> mae(k_values.size(), 0.0);
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    for (std::size_t q = 0; q < queries; ++q) mae[ki] += errors[q][ki];
    mae[ki] /= static_cast<double>(queries);
  }
  return mae;
}

int knn_vote(std::span<const int> neighbor_labels) {
  if (neighbor_labels.empty()) throw InputError("cannot vote without neighbors");
  std::map<int, std::size_t> votes;
  for (int label : neighbor_labels) ++votes[label];
  int best = votes.begin()->first;
  std::size_t best_count = votes.begin()->second;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw DimensionError("macro-F1 needs equally sized, non-empty label lists");
  }
  std::map<int, std::size_t> tp, fp, fn;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    fn[truth[i]];  // every true class is reported
    if (truth[i] == predicted[i]) {
      ++tp[truth[i]];
    } else {
      ++fp[predicted[i]];
      ++fn[truth[i]];
    }
  }
  double total = 0.0;
  for (const auto& [label, misses] : fn) {
    const double t = static_cast<double>(tp[label]);
    const double denom = 2.0 * t + static_cast<double>(fp[label]) + static_cast<double>(misses);
    total += denom > 0.0 ? 2.0 * t / denom : 0.0;
  }
  return total / static_cast<double>(fn.size());
}

std::vector<double> knn_classify_eval(const Matrix& train, std::span<const int> train_labels,
                                      const Matrix& test, std::span<const int> test_labels,
                                      std::span<const std::size_t> k_values, std::size_t threads) {
  check_knn_inputs(train, train_labels.size(), test, test_labels.size(), k_values);
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
  const auto queries = static_cast<std::size_t>(test.rows());
  std::vector<std::vector<int>> predictions(k_values.size(), std::vector<int>(queries));
  parallel_for(queries, threads, [&](std::size_t q) {
    const auto nn = nearest_neighbors(train, test.row(static_cast<Eigen::Index>(q)).transpose(), k_max);
    std::vector<int> labels;
    for (std::size_t j : nn) labels.push_back(train_labels[j]);
    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
      predictions[ki][q] = knn_vote(std::span<const int>(labels.data(), k_values[ki]));
    }
  });
  std::vector<double> f1(k_values.size());
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) f1[ki] = macro_f1(test_labels, predictions[ki]);
  return f1;
}

// ---------------------------------------------------------------------------
// Interpolation

std::string to_string(InterpolationMode mode) {
  return mode == InterpolationMode::equivariant ? "equivariant" : "invariant";
}

InterpolationMode parse_interpolation_mode(std::string_view text) {
  if (text == "equivariant") return InterpolationMode::equivariant;
  if (text == "invariant") return InterpolationMode::invariant;
  throw InputError("unknown interpolation mode '" + std::string(text) +
                   "' (expected equivariant or invariant)");
}

InterpolationPath interpolate(const Vector& z1, const Vector& z2, InterpolationMode mode,
                              std::size_t steps) {
  if (z1.size() != z2.size()) {
    throw DimensionError("interpolation endpoints differ in length (" + std::to_string(z1.size()) +
                         " vs " + std::to_string(z2.size()) + ")");
  }
  if (steps < 2) throw InputError("interpolation needs at least 2 steps");
  InterpolationPath path;
  path.z1 = z1;
  path.z2 = z2;
  path.mode = mode;
  const Vector a = mode == InterpolationMode::invariant ? sort_projection(z1).sorted : z1;
  const Vector b = mode == InterpolationMode::invariant ? sort_projection(z2).sorted : z2;
  for (std::size_t s = 0; s < steps; ++s) {
    const double alpha = static_cast<double>(s) / static_cast<double>(steps - 1);
    path.alphas.push_back(alpha);
    if (s == 0) {
      path.points.push_back(b);
    } else if (s + 1 == steps) {
      path.points.push_back(a);
    } else {
      path.points.push_back(alpha * a + (1.0 - alpha) * b);
    }
  }
  return path;
}

void decode_path(const VaeParams& params, InterpolationPath& path) {
  path.decoded.clear();
  for (const auto& z : path.points) path.decoded.push_back(decode_graph(params, z));
}

std::size_t hamming(const Graph& a, const Graph& b) {
  if (a.n != b.n || a.node_categories != b.node_categories ||
      a.edge_categories != b.edge_categories) {
    throw DimensionError("Hamming distance needs graphs of equal n, d_A and d_E");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.n; ++i) {
    if (a.node(i) != b.node(i)) ++count;
    for (std::size_t j = i + 1; j < a.n; ++j) {
      if (a.edge(i, j) != b.edge(i, j)) ++count;
    }
  }
  return count;
}

std::vector<std::size_t> consecutive_hamming(const InterpolationPath& path) {
  std::vector<std::size_t> out;
  for (std::size_t s = 1; s < path.decoded.size(); ++s) {
    out.push_back(hamming(path.decoded[s - 1], path.decoded[s]));
  }
  return out;
}

double mean_consecutive_hamming(const InterpolationPath& path) {
  const auto d = consecutive_hamming(path);
  if (d.empty()) return 0.0;
  return static_cast<double>(std::accumulate(d.begin(), d.end(), std::size_t{0})) /
         static_cast<double>(d.size());
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("histogram bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  double top = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("histogram values must be finite and >= 0");
    top = std::max(top, v);
  }
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(top / bin_width)));
  h.counts.assign(bins, 0);
  for (double v : values) {
    ++h.counts[std::min(bins - 1, static_cast<std::size_t>(std::floor(v / bin_width)))];
  }
  return h;
}

StabilityResult interpolation_stability(const VaeParams& params,
                                        std::span<const LatentPair> pairs,
                                        InterpolationMode mode, std::size_t steps,
                                        std::size_t threads) {
  StabilityResult result;
  result.per_path.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    auto path = interpolate(pairs[i].a, pairs[i].b, mode, steps);
    decode_path(params, path);
    result.per_path[i] = mean_consecutive_hamming(path);
  });
  result.histogram = make_histogram(result.per_path);
  if (!pairs.empty()) {
    result.mean = std::accumulate(result.per_path.begin(), result.per_path.end(), 0.0) /
                  static_cast<double>(pairs.size());
  }
  return result;
}

}  // namespace equilens
