#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace equilens {

inline constexpr double kFiniteDifferenceStep = 1e-5;

struct GradCheckResult {
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  std::size_t coordinates = 0;
};

// Compares `analytic` with central differences of `f` at `x` on the listed
// coordinates (all coordinates when `coords` is empty). `x` is restored
// before returning.
GradCheckResult check_gradient(const std::function<double(std::span<const double>)>& f,
                               std::span<double> x, std::span<const double> analytic,
                               std::span<const std::size_t> coords = {},
                               double h = kFiniteDifferenceStep);

double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace equilens
