#include <benchmark/benchmark.h>

#include <random>

#include "equilens/equivariant_layer.hpp"
#include "equilens/invariant.hpp"
#include "equilens/quotient.hpp"
#include "equilens/synthetic.hpp"
#include "equilens/vae.hpp"

using namespace equilens;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return z;
}

void BM_QuotientSorted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(quotient_dist_sorted(a, b).distance);
}
BENCHMARK(BM_QuotientSorted)->Arg(6)->Arg(64)->Arg(1024);

void BM_QuotientBruteForce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector a = random_vector(n, 1), b = random_vector(n, 2);
  const auto spec = GroupSpec::symmetric(n);
  for (auto _ : state) benchmark::DoNotOptimize(quotient_dist_bruteforce(a, b, spec).distance);
}
BENCHMARK(BM_QuotientBruteForce)->DenseRange(4, 8, 2);

void BM_QuotientRotation(benchmark::State& state) {
  const std::vector<int> freqs{0, 1, 1, 2, 3};
  const Vector a = random_vector(9, 1), b = random_vector(9, 2);
  for (auto _ : state) benchmark::DoNotOptimize(quotient_dist_rotation(a, b, freqs).distance);
}
BENCHMARK(BM_QuotientRotation);

void BM_EquivariantLayer(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int l = static_cast<int>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  EquivariantLayer layer(k, l, 8, 8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (double& w : layer.weights) w = normal(rng);
  auto x = NodeTensor::zeros(k, n, 8);
  for (double& v : x.data) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(layer.forward(x).data.data());
}
BENCHMARK(BM_EquivariantLayer)->Args({1, 2, 6})->Args({2, 2, 6})->Args({2, 1, 6})->Args({2, 2, 12});

void BM_ElboGradient(benchmark::State& state) {
  const auto data = generate_synthetic(default_synthetic_spec(), 1, 4);
  const auto params = VaeParams::initialize(config_for(data, 8), 5);
  auto grad = VaeParams::zeros(params.config);
  const Vector eps = standard_normal_noise(data.n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(elbo_gradient(params, data.graphs[0], eps, grad).loss);
}
BENCHMARK(BM_ElboGradient);

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = generate_synthetic(default_synthetic_spec(), 64, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, cfg).loss_curve.back());
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_ReynoldsProjection(benchmark::State& state) {
  const auto map = reynolds_random_projection(GroupSpec::symmetric(6), 6, 3, 1);
  const Vector z = random_vector(6, 7);
  for (auto _ : state) benchmark::DoNotOptimize(map.apply(z).data());
}
BENCHMARK(BM_ReynoldsProjection);

}  // namespace
BENCHMARK_MAIN();
