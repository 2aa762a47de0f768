#include "equilens/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "equilens/error.hpp"

namespace equilens {

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("relative_error: length mismatch");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
  if (diff == 0.0) return 0.0;
  return std::sqrt(diff) / denom;
}

GradCheckResult check_gradient(const std::function<double(std::span<const double>)>& f,
                               std::span<double> x, std::span<const double> analytic,
                               std::span<const std::size_t> coords, double h) {
  if (analytic.size() != x.size()) throw DimensionError("check_gradient: length mismatch");
  std::vector<std::size_t> all;
  if (coords.empty()) {
    all.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) all[i] = i;
    coords = all;
  }
  std::vector<double> numeric;
  std::vector<double> expected;
  numeric.reserve(coords.size());
  expected.reserve(coords.size());
  for (std::size_t i : coords) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    numeric.push_back((up - down) / (2.0 * h));
    expected.push_back(analytic[i]);
  }
  return {relative_error(expected, numeric), coords.size()};
}

}  // namespace equilens
