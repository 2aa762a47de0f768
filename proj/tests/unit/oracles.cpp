#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

namespace oracle {

double orbit_distance_sym(const Vector& a, const Vector& b) {
  const auto n = static_cast<std::size_t>(a.size());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = a(static_cast<Eigen::Index>(i)) - b(static_cast<Eigen::Index>(p[i]));
      sq += d * d;
    }
    best = std::min(best, sq);
  } while (std::next_permutation(p.begin(), p.end()));
  return std::sqrt(best);
}

Vector rotate(const Vector& z, const std::vector<int>& frequencies, double theta) {
  Vector out = z;
  Eigen::Index k = 0;
  for (int f : frequencies) {
    if (f == 0) {
      ++k;
      continue;
    }
    const double x = z(k), y = z(k + 1);
    out(k) = std::cos(f * theta) * x - std::sin(f * theta) * y;
    out(k + 1) = std::sin(f * theta) * x + std::cos(f * theta) * y;
    k += 2;
  }
  return out;
}

double orbit_distance_rotation_grid(const Vector& a, const Vector& b,
                                    const std::vector<int>& frequencies, std::size_t points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
    best = std::min(best, (a - rotate(b, frequencies, theta)).squaredNorm());
  }
  return std::sqrt(best);
}

Vector permute(const Vector& x, const std::vector<std::size_t>& p) {
  Vector out(x.size());
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(p[i])) = x(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<std::size_t> random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

std::uint64_t bell(int m) {
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < m; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = next;
  }
  return row.front();
}

std::vector<std::vector<int>> set_partitions(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> rec = [&](int pos, int max_label) {
    if (pos == m) {
      out.push_back(labels);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      labels[static_cast<std::size_t>(pos)] = l;
      rec(pos + 1, std::max(max_label, l));
    }
  };
  if (m == 0) return {{}};
  labels[0] = 0;
  rec(1, 0);
  return out;
}

std::vector<int> pattern_of(const std::vector<std::size_t>& tuple) {
  std::map<std::size_t, int> seen;
  std::vector<int> out;
  for (auto v : tuple) {
    auto it = seen.find(v);
    if (it == seen.end()) it = seen.emplace(v, static_cast<int>(seen.size())).first;
    out.push_back(it->second);
  }
  return out;
}

namespace {

std::vector<std::size_t> digits(std::size_t pos, int order, std::size_t n) {
  if (order == 1) return {pos};
  return {pos / n, pos % n};
}

}  // namespace

equilens::NodeTensor dense_layer(const std::vector<std::vector<int>>& partitions,
                                 const std::vector<double>& weights,
                                 const std::vector<double>& bias, std::size_t d_out,
                                 const equilens::NodeTensor& x, int out_order) {
  const std::size_t n = x.n;
  const std::size_t d_in = x.channels;
  const std::size_t in_count = x.positions();
  const std::size_t out_count = out_order == 1 ? n : n * n;
  const auto bias_patterns = set_partitions(out_order);
  auto y = equilens::NodeTensor::zeros(out_order, n, d_out);
  for (std::size_t out = 0; out < out_count; ++out) {
    const auto od = digits(out, out_order, n);
    std::vector<std::size_t> matched(partitions.size(), 0);
    std::vector<std::vector<double>> sums(partitions.size(), std::vector<double>(d_in, 0.0));
    for (std::size_t in = 0; in < in_count; ++in) {
      auto tuple = digits(in, x.order, n);
      tuple.insert(tuple.end(), od.begin(), od.end());
      const auto pat = pattern_of(tuple);
      const auto g = static_cast<std::size_t>(
          std::find(partitions.begin(), partitions.end(), pat) - partitions.begin());
      ++matched[g];
      for (std::size_t c = 0; c < d_in; ++c) sums[g][c] += x.at(in, c);
    }
    for (std::size_t g = 0; g < partitions.size(); ++g) {
      if (matched[g] == 0) continue;
      for (std::size_t c = 0; c < d_in; ++c) {
        for (std::size_t o = 0; o < d_out; ++o) {
          y.at(out, o) += weights[(g * d_in + c) * d_out + o] * sums[g][c] /
                          static_cast<double>(matched[g]);
        }
      }
    }
    const auto bp = pattern_of(od);
    const auto beta = static_cast<std::size_t>(
        std::find(bias_patterns.begin(), bias_patterns.end(), bp) - bias_patterns.begin());
    for (std::size_t o = 0; o < d_out; ++o) y.at(out, o) += bias[beta * d_out + o];
  }
  return y;
}

equilens::NodeTensor permute_tensor(const equilens::NodeTensor& x,
                                    const std::vector<std::size_t>& p) {
  auto y = equilens::NodeTensor::zeros(x.order, x.n, x.channels);
  for (std::size_t pos = 0; pos < x.positions(); ++pos) {
    const std::size_t target = x.order == 1 ? p[pos] : p[pos / x.n] * x.n + p[pos % x.n];
    for (std::size_t c = 0; c < x.channels; ++c) y.at(target, c) = x.at(pos, c);
  }
  return y;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

equilens::Graph permute_graph(const equilens::Graph& g, const std::vector<std::size_t>& p) {
  equilens::Graph h = g;
  for (std::size_t i = 0; i < g.n; ++i) {
    h.node_labels[p[i]] = g.node_labels[i];
    for (std::size_t j = 0; j < g.n; ++j) h.edge_labels[p[i] * g.n + p[j]] = g.edge_labels[i * g.n + j];
  }
  return h;
}

std::size_t automorphism_count(const equilens::Graph& g) {
  std::vector<std::size_t> p(g.n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::size_t count = 0;
  do {
    const auto h = permute_graph(g, p);
    count += (h.node_labels == g.node_labels && h.edge_labels == g.edge_labels);
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

}  // namespace oracle
