#include "equilens/quotient.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "equilens/error.hpp"
#include "equilens/invariant.hpp"

namespace equilens {

namespace {

void require_same_length(const Vector& z1, const Vector& z2) {
  if (z1.size() != z2.size()) {
    throw DimensionError("latent vectors have different lengths (" + std::to_string(z1.size()) +
                         " vs " + std::to_string(z2.size()) + ")");
  }
}

// ||z1 - R(theta) z2||^2 = constant - 2 sum_b [cos(f_b theta) P_b + sin(f_b theta) Q_b]
class RotationObjective {
 public:
  RotationObjective(const Vector& z1, const Vector& z2, std::span<const int> frequencies) {
    Eigen::Index offset = 0;
    for (int f : frequencies) {
      if (f == 0) {
        const double d = z1(offset) - z2(offset);
        constant_ += d * d;
        offset += 1;
        continue;
      }
      const double a0 = z1(offset), a1 = z1(offset + 1);
      const double b0 = z2(offset), b1 = z2(offset + 1);
      constant_ += a0 * a0 + a1 * a1 + b0 * b0 + b1 * b1;
      terms_.push_back({f, a0 * b0 + a1 * b1, a1 * b0 - a0 * b1});
      offset += 2;
    }
  }

  bool trivial() const { return terms_.empty(); }

  double operator()(double theta) const {
    double value = constant_;
    for (const auto& t : terms_) {
      value -= 2.0 * (std::cos(t.frequency * theta) * t.cos_coeff +
                      std::sin(t.frequency * theta) * t.sin_coeff);
    }
    return value;
  }

  // First and second derivatives in theta.
  std::pair<double, double> derivatives(double theta) const {
    double d1 = 0.0, d2 = 0.0;
    for (const auto& t : terms_) {
      const double f = t.frequency;
      const double c = std::cos(f * theta), s = std::sin(f * theta);
      d1 -= 2.0 * f * (c * t.sin_coeff - s * t.cos_coeff);
      d2 += 2.0 * f * f * (c * t.cos_coeff + s * t.sin_coeff);
    }
    return {d1, d2};
  }

 private:
  struct Term {
    int frequency;
    double cos_coeff;
    double sin_coeff;
  };
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

// Minimizes a unimodal function on [lo, hi]; returns the best abscissa seen.
double golden_section(const RotationObjective& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// Newton steps on the derivative; golden section alone stalls near
// sqrt(machine epsilon) in theta.
double polish(const RotationObjective& f, double theta) {
  auto [d1, d2] = f.derivatives(theta);
  for (int iter = 0; iter < 8 && d2 > 0.0; ++iter) {
    const double next = theta - d1 / d2;
    const auto [n1, n2] = f.derivatives(next);
    if (!(std::abs(n1) < std::abs(d1))) break;
    theta = next;
    d1 = n1;
    d2 = n2;
  }
  return theta;
}

double wrap_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta, kTwoPi);
  if (theta <= -std::numbers::pi) theta += kTwoPi;
  if (theta > std::numbers::pi) theta -= kTwoPi;
  return theta;
}

}  // namespace

std::string to_string(DistanceMethod method) {
  switch (method) {
    case DistanceMethod::bruteforce:
      return "bruteforce";
    case DistanceMethod::sorted:
      return "sorted";
    case DistanceMethod::rotation_opt:
      return "rotation";
  }
  return "unknown";
}

QuotientDistance quotient_dist_bruteforce(const Vector& z1, const Vector& z2,
                                          const GroupSpec& spec, std::uint64_t cap) {
  require_same_length(z1, z2);
  QuotientDistance best;
  best.distance = std::numeric_limits<double>::infinity();
  best.method = DistanceMethod::bruteforce;
  for_each_element(
      spec,
      [&](const GroupElement& g) {
        const double d = (z1 - act(spec, g, z2)).norm();
        if (d < best.distance) {
          best.distance = d;
          best.minimizer = g;
        }
      },
      cap);
  return best;
}

QuotientDistance quotient_dist_sorted(const Vector& z1, const Vector& z2) {
  require_same_length(z1, z2);
  const auto s1 = sort_projection(z1);
  const auto s2 = sort_projection(z2);
  QuotientDistance result;
  result.distance = (s1.sorted - s2.sorted).norm();
  // sigma1^{-1} sigma2 carries z2 onto the ordering of z1.
  result.minimizer = s1.perm.inverse() * s2.perm;
  result.method = DistanceMethod::sorted;
  return result;
}

QuotientDistance quotient_dist_rotation(const Vector& z1, const Vector& z2,
                                        std::span<const int> frequencies, std::size_t grid) {
  require_same_length(z1, z2);
  const auto dim = frequency_layout_dimension(frequencies);
  if (static_cast<std::size_t>(z1.size()) != dim) {
    throw DimensionError("latent length " + std::to_string(z1.size()) +
                         " does not match the frequency layout of dimension " +
                         std::to_string(dim));
  }
  if (grid < 8) throw InputError("rotation grid needs at least 8 points");

  QuotientDistance result;
  result.method = DistanceMethod::rotation_opt;
  const RotationObjective objective(z1, z2, frequencies);
  if (objective.trivial()) {
    result.distance = (z1 - z2).norm();
    result.minimizer = RotationAngle{0.0};
    return result;
  }

  const double step = 2.0 * std::numbers::pi / static_cast<double>(grid);
  std::vector<double> values(grid);
  for (std::size_t i = 0; i < grid; ++i) values[i] = objective(step * static_cast<double>(i));

  double best_theta = 0.0;
  double best_value = values[0];
  for (std::size_t i = 0; i < grid; ++i) {
    const double prev = values[(i + grid - 1) % grid];
    const double next = values[(i + 1) % grid];
    if (values[i] > prev || values[i] > next) continue;
    const double center = step * static_cast<double>(i);
    if (values[i] < best_value) {
      best_value = values[i];
      best_theta = center;
    }
    const double theta = polish(objective, golden_section(objective, center - step, center + step));
    const double value = objective(theta);
    if (value < best_value) {
      best_value = value;
      best_theta = theta;
    }
  }

  best_theta = wrap_angle(best_theta);
  result.minimizer = RotationAngle{best_theta};
  result.distance = (z1 - apply_rotation(frequencies, best_theta, z2)).norm();
  return result;
}

QuotientDistance quotient_dist_auto(const Vector& z1, const Vector& z2, const GroupSpec& spec) {
  if (spec.is_cyclic()) return quotient_dist_rotation(z1, z2, spec.frequencies());
  if (static_cast<std::size_t>(z1.size()) == spec.degree()) return quotient_dist_sorted(z1, z2);
  return quotient_dist_bruteforce(z1, z2, spec);
}

}  // namespace equilens
