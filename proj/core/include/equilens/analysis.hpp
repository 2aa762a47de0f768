#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "equilens/graph.hpp"
#include "equilens/linalg.hpp"
#include "equilens/vae.hpp"

namespace equilens {

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
  Vector mean;
  Matrix components;  // dim x 2, orthonormal columns
  Vector explained_variance;  // 2 entries, non-increasing
};

// Top-2 eigenvectors of the sample covariance (n - 1 denominator). Each
// component is signed so that its largest-magnitude entry is positive.
PcaModel pca_fit(const Matrix& data);
Matrix pca_transform(const PcaModel& model, const Matrix& data);

// ---------------------------------------------------------------------------
// kNN evaluation

// Indices of the k nearest rows of `train` to `query` (Euclidean), ties by
// lower index.
std::vector<std::size_t> nearest_neighbors(const Matrix& train, const Vector& query,
                                           std::size_t k);

// Mean absolute error of the k-neighbor mean prediction, one entry per k.
std::vector<double> knn_regress_eval(const Matrix& train, std::span<const double> train_props,
                                     const Matrix& test, std::span<const double> test_props,
                                     std::span<const std::size_t> k_values,
                                     std::size_t threads = 1);

// Majority vote, vote ties to the smallest label.
int knn_vote(std::span<const int> neighbor_labels);

// Macro-F1 over the classes present in the truth labels.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

std::vector<double> knn_classify_eval(const Matrix& train, std::span<const int> train_labels,
                                      const Matrix& test, std::span<const int> test_labels,
                                      std::span<const std::size_t> k_values,
                                      std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Interpolation

enum class InterpolationMode { equivariant, invariant };

std::string to_string(InterpolationMode mode);
InterpolationMode parse_interpolation_mode(std::string_view text);

struct InterpolationPath {
  Vector z1;
  Vector z2;
  InterpolationMode mode = InterpolationMode::equivariant;
  std::vector<double> alphas;  // ascending, 0 and 1 included
  std::vector<Vector> points;  // alpha * a + (1 - alpha) * b
  std::vector<Graph> decoded;  // filled by decode_path
};

// Equivariant mode interpolates z1 and z2; invariant mode their sorted
// representatives. alpha weights z1, so points.front() is the z2 side.
InterpolationPath interpolate(const Vector& z1, const Vector& z2, InterpolationMode mode,
                              std::size_t steps);

void decode_path(const VaeParams& params, InterpolationPath& path);

// Differing node slots plus differing upper-triangle edge slots.
std::size_t hamming(const Graph& a, const Graph& b);

// Hamming distance between consecutive decoded graphs of a path.
std::vector<std::size_t> consecutive_hamming(const InterpolationPath& path);
double mean_consecutive_hamming(const InterpolationPath& path);

struct Histogram {
  double bin_width = 0.5;
  std::vector<std::size_t> counts;  // bin i covers [i * w, (i + 1) * w); last bin closed
};

// Fixed-width bins over [0, max(values)].
Histogram make_histogram(std::span<const double> values, double bin_width = 0.5);

struct LatentPair {
  Vector a;
  Vector b;
};

struct StabilityResult {
  std::vector<double> per_path;  // mean consecutive Hamming per pair
  Histogram histogram;
  double mean = 0.0;
};

StabilityResult interpolation_stability(const VaeParams& params,
                                        std::span<const LatentPair> pairs,
                                        InterpolationMode mode, std::size_t steps,
                                        std::size_t threads = 1);

}  // namespace equilens
