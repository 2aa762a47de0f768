#include "equilens/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "equilens/equivariant_layer.hpp"
#include "equilens/gradcheck.hpp"
#include "equilens/invariant.hpp"
#include "equilens/partition.hpp"
#include "equilens/pointwise.hpp"
#include "equilens/quotient.hpp"
#include "equilens/vae.hpp"

namespace equilens {

namespace {

using Clock = std::chrono::steady_clock;

Vector normal_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

std::vector<double> normal_values(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

NodeTensor random_tensor(int order, std::size_t n, std::size_t channels, Rng& rng) {
  NodeTensor t = NodeTensor::zeros(order, n, channels);
  t.data = normal_values(t.data.size(), rng);
  return t;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_sorted_vector(const Vector& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i - 1) > v(i)) return false;
  }
  return true;
}

double max_abs_diff(const NodeTensor& a, const NodeTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

template <class Body>
CheckOutcome timed(int id, std::string title, Body&& body) {
  CheckOutcome out;
  out.id = id;
  out.title = std::move(title);
  const auto start = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

// Finite-difference check on a private copy of the evaluation point.
GradCheckResult check_copy(const std::function<double(std::span<const double>)>& f,
                           std::vector<double> x, std::span<const double> analytic,
                           std::span<const std::size_t> coords = {}) {
  return check_gradient(f, x, analytic, coords);
}

// Tracks the worst relative error of a family of gradient checks.
struct GradTally {
  double worst = 0.0;
  std::string worst_name;

  void add(const std::string& name, const GradCheckResult& r) {
    if (!(r.relative_error <= worst)) {
      worst = r.relative_error;
      worst_name = name;
    }
  }
};

void check_layer_gradients(const EquivariantLayer& proto, std::size_t n, Rng& rng,
                           GradTally& tally) {
  EquivariantLayer layer = proto;
  layer.weights = normal_values(layer.weights.size(), rng);
  layer.bias = normal_values(layer.bias.size(), rng);
  NodeTensor x = random_tensor(layer.in_order, n, layer.d_in, rng);
  const NodeTensor r = random_tensor(layer.out_order, n, layer.d_out, rng);
  EquivariantLayer grad(layer.in_order, layer.out_order, layer.d_in, layer.d_out);
  const NodeTensor dx = layer.backward(x, r, grad);
  const std::string name = "equivariant " + std::to_string(layer.in_order) + "->" +
                           std::to_string(layer.out_order);

  tally.add(name + " weights",
            check_copy(
                [&](std::span<const double> w) {
                  EquivariantLayer l = layer;
                  l.weights.assign(w.begin(), w.end());
                  return dot(l.forward(x).data, r.data);
                },
                layer.weights, grad.weights));
  tally.add(name + " bias", check_copy(
                                [&](std::span<const double> b) {
                                  EquivariantLayer l = layer;
                                  l.bias.assign(b.begin(), b.end());
                                  return dot(l.forward(x).data, r.data);
                                },
                                layer.bias, grad.bias));
  tally.add(name + " input", check_copy(
                                 [&](std::span<const double> v) {
                                   NodeTensor xi = x;
                                   xi.data.assign(v.begin(), v.end());
                                   return dot(layer.forward(xi).data, r.data);
                                 },
                                 x.data, dx.data));
}

}  // namespace

CheckOutcome check_sort_isometry(std::uint64_t seed) {
  return timed(1, "sorted quotient distance equals brute force (n = 2..7)", [&](CheckOutcome& out) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t n = 2; n <= 7; ++n) {
      const GroupSpec spec = GroupSpec::symmetric(n);
      for (int t = 0; t < 200; ++t) {
        const Vector z1 = normal_vector(n, rng);
        const Vector z2 = normal_vector(n, rng);
        const double fast = quotient_dist_sorted(z1, z2).distance;
        const double slow = quotient_dist_bruteforce(z1, z2, spec).distance;
        worst = std::max(worst, std::abs(fast - slow));
      }
    }
    out.passed = worst < 1e-12;
    out.detail = "max |sorted - bruteforce| = " + std::to_string(worst);
  });
}

CheckOutcome check_projection_invariance(std::uint64_t seed) {
  return timed(2, "invariant projections are invariant", [&](CheckOutcome& out) {
    Rng rng(seed);
    std::ostringstream detail;
    bool ok = true;
    auto run = [&](const InvariantMap& map, const GroupSpec& action, bool exact) {
      double worst = 0.0;
      for (int t = 0; t < 1000; ++t) {
        const Vector z = normal_vector(map.in_dim, rng);
        const GroupElement g = random_element(action, rng);
        const Vector a = map.apply(z);
        const Vector b = map.apply(act(action, g, z));
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
      }
      const bool pass = exact ? worst == 0.0 : worst < 1e-9;
      ok = ok && pass;
      detail << to_string(map.kind) << " " << action.to_string() << " max " << worst << "; ";
    };
    const std::size_t n = 6;
    const GroupSpec sym = GroupSpec::symmetric(n);
    run(sorting_map(n), sym, true);
    run(pooling_map(PoolKind::sum, n, 2), sym, true);
    run(pooling_map(PoolKind::mean, n, 2), sym, true);
    run(pooling_map(PoolKind::max, n, 2), sym, true);
    run(partition_invariant_projection(n, 2, 4, 1, seed), sym, false);
    // Order-2 tensors need the conjugation action, applied via the tensor path.
    {
      const InvariantMap map = partition_invariant_projection(n, 2, 4, 2, seed + 1);
      double worst = 0.0;
      for (int t = 0; t < 1000; ++t) {
        const NodeTensor x = random_tensor(2, n, 2, rng);
        const NodeTensor gx = permute(x, random_permutation(n, rng));
        const Vector a = map.apply(Eigen::Map<const Vector>(x.data.data(), static_cast<Eigen::Index>(x.data.size())));
        const Vector b = map.apply(Eigen::Map<const Vector>(gx.data.data(), static_cast<Eigen::Index>(gx.data.size())));
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
      }
      ok = ok && worst < 1e-9;
      detail << "partition order-2 max " << worst << "; ";
    }
    run(reynolds_random_projection(sym, n, 4, seed + 2), sym, false);
    const GroupSpec cyc = GroupSpec::cyclic(12, {0, 1, 2});
    run(reynolds_random_projection(cyc, cyc.dimension(), 3, seed + 3), cyc, false);
    out.passed = ok;
    out.detail = detail.str();
  });
}

CheckOutcome check_convex_cone(std::uint64_t seed) {
  return timed(3, "sorted cone is closed under convex combination and scaling", [&](CheckOutcome& out) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> dim(2, 10);
    std::size_t failures = 0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = dim(rng);
      const Vector a = sort_projection(normal_vector(n, rng)).sorted;
      const Vector b = sort_projection(normal_vector(n, rng)).sorted;
      const double alpha = unit(rng);
      const double lambda = 10.0 * unit(rng);
      if (!is_sorted_vector(alpha * a + (1.0 - alpha) * b)) ++failures;
      if (!is_sorted_vector(lambda * a)) ++failures;
    }
    out.passed = failures == 0;
    out.detail = std::to_string(failures) + " unsorted results";
  });
}

CheckOutcome check_sort_nonexpansive(std::uint64_t seed) {
  return timed(4, "sorting is non-expansive", [&](CheckOutcome& out) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> dim(1, 12);
    double worst = -1e300;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = dim(rng);
      const Vector x = normal_vector(n, rng);
      const Vector y = normal_vector(n, rng);
      const double lhs = (sort_projection(x).sorted - sort_projection(y).sorted).norm();
      worst = std::max(worst, lhs - (x - y).norm());
    }
    out.passed = worst <= 1e-12;
    out.detail = "max ||s(x)-s(y)|| - ||x-y|| = " + std::to_string(worst);
  });
}

CheckOutcome check_partition_basis(std::uint64_t seed) {
  return timed(5, "partition basis counts and layer equivariance", [&](CheckOutcome& out) {
    Rng rng(seed);
    const std::size_t c2 = enumerate_partitions(2).size();
    const std::size_t c3 = enumerate_partitions(3).size();
    const std::size_t c4 = enumerate_partitions(4).size();
    bool ok = c2 == 2 && c3 == 5 && c4 == 15;
    double worst = 0.0;
    for (std::size_t n : {4u, 5u, 6u}) {
      for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
          const auto& partitions = BasisOperator::get(k, l, n).partitions();
          EquivariantLayer layer(k, l, 2, 3);
          layer.weights = normal_values(layer.weights.size(), rng);
          layer.bias = normal_values(layer.bias.size(), rng);
          for (int t = 0; t < 100; ++t) {
            const Permutation p = random_permutation(n, rng);
            const NodeTensor x = random_tensor(k, n, 2, rng);
            const NodeTensor px = permute(x, p);
            for (const auto& gamma : partitions) {
              worst = std::max(worst, max_abs_diff(basis_apply(gamma, px),
                                                   permute(basis_apply(gamma, x), p)));
            }
            worst = std::max(worst, max_abs_diff(layer.forward(px), permute(layer.forward(x), p)));
          }
        }
      }
      HybridLayer hybrid(3, 2, 2, 2);
      hybrid.node_part.weights = normal_values(hybrid.node_part.weights.size(), rng);
      hybrid.edge_part.weights = normal_values(hybrid.edge_part.weights.size(), rng);
      for (int t = 0; t < 100; ++t) {
        const Permutation p = random_permutation(n, rng);
        const NodeTensor v = random_tensor(1, n, 3, rng);
        const NodeTensor e = random_tensor(2, n, 2, rng);
        worst = std::max(worst, max_abs_diff(hybrid.forward(permute(v, p), permute(e, p)),
                                             permute(hybrid.forward(v, e), p)));
      }
    }
    ok = ok && worst < 1e-9;
    out.passed = ok;
    out.detail = "partitions(2,3,4) = " + std::to_string(c2) + "," + std::to_string(c3) + "," +
                 std::to_string(c4) + "; max equivariance error " + std::to_string(worst);
  });
}

CheckOutcome check_gradients(std::uint64_t seed) {
  return timed(6, "analytic gradients match central differences", [&](CheckOutcome& out) {
    Rng rng(seed);
    GradTally tally;
    std::size_t redrawn = 0;
    for (int instance = 0; instance < 20; ++instance) {
      const std::size_t n = 4 + static_cast<std::size_t>(instance % 3);
      for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) check_layer_gradients(EquivariantLayer(k, l, 2, 3), n, rng, tally);
      }

      {
        HybridLayer layer(3, 2, 2, 3);
        for (auto* part : {&layer.node_part, &layer.edge_part}) {
          part->weights = normal_values(part->weights.size(), rng);
          part->bias = normal_values(part->bias.size(), rng);
        }
        const NodeTensor v = random_tensor(1, n, 3, rng);
        const NodeTensor e = random_tensor(2, n, 2, rng);
        const NodeTensor r = random_tensor(2, n, 5, rng);
        HybridLayer grad(3, 2, 2, 3);
        NodeTensor dv, de;
        layer.backward(v, e, r, grad, &dv, &de);
        tally.add("hybrid nodes", check_copy(
                                      [&](std::span<const double> x) {
                                        NodeTensor vi = v;
                                        vi.data.assign(x.begin(), x.end());
                                        return dot(layer.forward(vi, e).data, r.data);
                                      },
                                      v.data, dv.data));
        tally.add("hybrid edges", check_copy(
                                      [&](std::span<const double> x) {
                                        NodeTensor ei = e;
                                        ei.data.assign(x.begin(), x.end());
                                        return dot(layer.forward(v, ei).data, r.data);
                                      },
                                      e.data, de.data));
      }

      {
        ChannelMix mix(3, 4);
        mix.weights = normal_values(mix.weights.size(), rng);
        mix.bias = normal_values(mix.bias.size(), rng);
        const NodeTensor x = random_tensor(2, n, 3, rng);
        const NodeTensor r = random_tensor(2, n, 4, rng);
        ChannelMix grad(3, 4);
        const NodeTensor dx = mix.backward(x, r, grad);
        tally.add("channel mix weights", check_copy(
                                             [&](std::span<const double> w) {
                                               ChannelMix m = mix;
                                               m.weights.assign(w.begin(), w.end());
                                               return dot(m.forward(x).data, r.data);
                                             },
                                             mix.weights, grad.weights));
        tally.add("channel mix input", check_copy(
                                           [&](std::span<const double> v) {
                                             NodeTensor xi = x;
                                             xi.data.assign(v.begin(), v.end());
                                             return dot(mix.forward(xi).data, r.data);
                                           },
                                           x.data, dx.data));
      }

      {
        NodeTensor x = random_tensor(2, n, 3, rng);
        for (double& v : x.data) {
          if (std::abs(v) < 0.05) v += v < 0.0 ? -0.1 : 0.1;  // keep away from the kink
        }
        const NodeTensor r = random_tensor(2, n, 3, rng);
        tally.add("relu", check_copy(
                              [&](std::span<const double> v) {
                                NodeTensor xi = x;
                                xi.data.assign(v.begin(), v.end());
                                return dot(relu(xi).data, r.data);
                              },
                              x.data, relu_backward(x, r).data));
        tally.add("softmax", check_copy(
                                 [&](std::span<const double> v) {
                                   NodeTensor xi = x;
                                   xi.data.assign(v.begin(), v.end());
                                   return dot(softmax(xi).data, r.data);
                                 },
                                 x.data,
                                 softmax_backward(softmax(x), r).data));
        InstanceNormCache cache;
        instance_norm(x, &cache);
        tally.add("instance norm", check_copy(
                                       [&](std::span<const double> v) {
                                         NodeTensor xi = x;
                                         xi.data.assign(v.begin(), v.end());
                                         return dot(instance_norm(xi).data, r.data);
                                       },
                                       x.data,
                                       instance_norm_backward(cache, r).data));
        std::vector<double> logits = normal_values(5, rng);
        const int target = static_cast<int>(rng() % 5);
        std::vector<double> g(5);
        softmax_cross_entropy(logits, target, g);
        tally.add("softmax cross-entropy",
                  check_copy([&](std::span<const double> v) { return softmax_cross_entropy(v, target); },
                                 logits, g));
      }

      {
        VaeConfig config{5, 3, 3, 4};
        const VaeParams params =
            VaeParams::initialize(config, seed + static_cast<std::uint64_t>(instance));
        // Central differences are only meaningful where the loss is smooth,
        // so instances whose probes cross a ReLU kink are redrawn.
        for (;;) {
          Graph g = Graph::empty(config.n, config.node_categories, config.edge_categories);
          for (std::size_t i = 0; i < config.n; ++i) g.node_labels[i] = static_cast<int>(rng() % 2);
          for (std::size_t i = 0; i < config.n; ++i) {
            for (std::size_t j = i + 1; j < config.n; ++j) g.set_edge(i, j, static_cast<int>(rng() % 3));
          }
          const Vector eps = normal_vector(config.n, rng);
          VaeParams grad = VaeParams::zeros(config);
          elbo_gradient(params, g, eps, grad);
          std::vector<double> x = params.flatten();
          std::vector<std::size_t> coords;
          for (int c = 0; c < 120; ++c) coords.push_back(rng() % x.size());
          const auto base = relu_pattern(params, g, eps);
          bool crossed = false;
          VaeParams probe = params;
          const auto result = check_copy(
              [&](std::span<const double> v) {
                probe.assign(v);
                crossed = crossed || relu_pattern(probe, g, eps) != base;
                return elbo_with_noise(probe, g, eps).loss;
              },
              x, grad.flatten(), coords);
          if (!crossed) {
            tally.add("ELBO", result);
            break;
          }
          ++redrawn;
        }
      }
    }
    out.passed = tally.worst < 1e-4;
    std::ostringstream detail;
    detail << "worst relative error " << tally.worst << " (" << tally.worst_name << "); "
           << redrawn << " ELBO instances redrawn at ReLU kinks";
    out.detail = detail.str();
  });
}

CheckOutcome check_rotation_distance(std::uint64_t seed) {
  return timed(11, "rotation quotient distance matches a 10^6-point grid", [&](CheckOutcome& out) {
    Rng rng(seed);
    std::uniform_int_distribution<int> freq(0, 5);
    std::uniform_int_distribution<int> blocks(2, 4);
    double worst = 0.0;
    constexpr std::size_t kOracleGrid = 1000000;
    for (int t = 0; t < 100; ++t) {
      std::vector<int> freqs;
      const int b = blocks(rng);
      for (int i = 0; i < b; ++i) freqs.push_back(freq(rng));
      freqs.push_back(1 + freq(rng) % 5);  // at least one rotating block
      const std::size_t dim = frequency_layout_dimension(freqs);
      const Vector z1 = normal_vector(dim, rng);
      const Vector z2 = normal_vector(dim, rng);
      const double fast = quotient_dist_rotation(z1, z2, freqs).distance;
      // Dense scan of ||z1 - R(theta) z2||^2 written per block.
      double best = 1e300;
      for (std::size_t s = 0; s < kOracleGrid; ++s) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(s) / kOracleGrid;
        double sq = 0.0;
        Eigen::Index i = 0;
        for (int f : freqs) {
          if (f == 0) {
            const double d = z1(i) - z2(i);
            sq += d * d;
            ++i;
          } else {
            const double c = std::cos(f * theta);
            const double sn = std::sin(f * theta);
            const double dx = z1(i) - (c * z2(i) - sn * z2(i + 1));
            const double dy = z1(i + 1) - (sn * z2(i) + c * z2(i + 1));
            sq += dx * dx + dy * dy;
            i += 2;
          }
        }
        best = std::min(best, sq);
      }
      worst = std::max(worst, std::abs(fast - std::sqrt(best)));
    }
    out.passed = worst < 1e-6;
    out.detail = "max |optimized - grid oracle| = " + std::to_string(worst);
  });
}

std::vector<CheckOutcome> run_selftest(std::uint64_t seed, const CheckCallback& on_check) {
  std::vector<CheckOutcome> results;
  for (auto* check : {&check_sort_isometry, &check_projection_invariance, &check_convex_cone,
                      &check_sort_nonexpansive, &check_partition_basis, &check_gradients,
                      &check_rotation_distance}) {
    results.push_back(check(seed));
    if (on_check) on_check(results.back());
  }
  return results;
}

}  // namespace equilens
