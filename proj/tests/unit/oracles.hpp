#pragma once

// Reference implementations used to check the library. They are written
// directly from the definitions and favour clarity over speed.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "equilens/graph.hpp"
#include "equilens/linalg.hpp"
#include "equilens/tensor.hpp"

namespace oracle {

using equilens::Matrix;
using equilens::Vector;

// min over all n! coordinate permutations of ||a - P b||.
double orbit_distance_sym(const Vector& a, const Vector& b);

// min over a uniform grid of `points` angles of ||a - R(theta) b||, with R
// acting blockwise (frequency 0 fixes one coordinate, f > 0 rotates a pair
// by f * theta).
double orbit_distance_rotation_grid(const Vector& a, const Vector& b,
                                    const std::vector<int>& frequencies, std::size_t points);

// Rotation of a frequency-layout vector, written independently of the library.
Vector rotate(const Vector& z, const std::vector<int>& frequencies, double theta);

// (x permuted)[p[i]] = x[i]
Vector permute(const Vector& x, const std::vector<std::size_t>& p);
std::vector<std::size_t> random_perm(std::size_t n, std::mt19937_64& rng);

// Bell numbers from the Bell triangle.
std::uint64_t bell(int m);

// All set partitions of {0..m-1} as restricted growth strings.
std::vector<std::vector<int>> set_partitions(int m);

// Equality pattern of a tuple as a restricted growth string.
std::vector<int> pattern_of(const std::vector<std::size_t>& tuple);

// Dense evaluation of the equivariant layer definition: for every input and
// output index tuple, find the partition of the concatenated tuple and add
// w[gamma] * x / count_gamma(out), where count_gamma(out) is the number of
// inputs matched to `out` under gamma. `partitions` fixes the weight order.
equilens::NodeTensor dense_layer(const std::vector<std::vector<int>>& partitions,
                                 const std::vector<double>& weights,
                                 const std::vector<double>& bias, std::size_t d_out,
                                 const equilens::NodeTensor& x, int out_order);

// Node tensor relabelled by p (order 1 or 2).
equilens::NodeTensor permute_tensor(const equilens::NodeTensor& x,
                                    const std::vector<std::size_t>& p);

// Central differences of f at x for every coordinate.
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h = 1e-5);
double rel_error(const std::vector<double>& a, const std::vector<double>& b);

// Graph relabelled so that node i moves to p[i].
equilens::Graph permute_graph(const equilens::Graph& g, const std::vector<std::size_t>& p);

// Size of the automorphism group by brute force.
std::size_t automorphism_count(const equilens::Graph& g);

}  // namespace oracle
