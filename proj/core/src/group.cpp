#include "equilens/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "equilens/error.hpp"

namespace equilens {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t parse_size(std::string_view token, std::string_view context) {
  std::size_t value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    throw InputError("invalid integer '" + std::string(token) + "' in group spec '" +
                     std::string(context) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

const Permutation& as_permutation(const GroupElement& g, std::string_view where) {
  if (const auto* p = std::get_if<Permutation>(&g)) return *p;
  throw InputError(std::string(where) + ": expected a permutation element");
}

double step_angle(const GroupSpec& spec, std::size_t step) {
  return 2.0 * std::numbers::pi * static_cast<double>(step) /
         static_cast<double>(spec.degree());
}

}  // namespace

// ---------------------------------------------------------------------------
// Permutation

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  return Permutation(std::move(image));
}

Permutation Permutation::from_image(std::vector<std::size_t> image) {
  std::vector<bool> seen(image.size(), false);
  for (std::size_t v : image) {
    if (v >= image.size() || seen[v]) {
      throw InputError("permutation image is not a bijection on {0, ..., " +
                       std::to_string(image.size()) + "-1}");
    }
    seen[v] = true;
  }
  return Permutation(std::move(image));
}

Permutation Permutation::transposition(std::size_t n, std::size_t a, std::size_t b) {
  if (a >= n || b >= n) throw InputError("transposition index out of range");
  auto p = identity(n);
  std::swap(p.image_[a], p.image_[b]);
  return p;
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (image_[i] != i) return false;
  }
  return true;
}

Matrix Permutation::matrix() const {
  const auto n = static_cast<Eigen::Index>(image_.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < image_.size(); ++i) {
    m(static_cast<Eigen::Index>(image_[i]), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return m;
}

std::string Permutation::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (i) out << ' ';
    out << image_[i];
  }
  return out.str();
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw DimensionError("composing permutations of different sizes");
  std::vector<std::size_t> image(a.size());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = a.image_[b.image_[i]];
  return Permutation(std::move(image));
}

Vector apply_perm_vector(const Permutation& p, const Vector& z) {
  return apply_perm_rows(p, z, 1);
}

Vector apply_perm_rows(const Permutation& p, const Vector& z, std::size_t channels) {
  if (channels == 0 || static_cast<std::size_t>(z.size()) != p.size() * channels) {
    throw DimensionError("vector of length " + std::to_string(z.size()) +
                         " does not match permutation of size " + std::to_string(p.size()) +
                         " with " + std::to_string(channels) + " channel(s)");
  }
  Vector out(z.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      out(static_cast<Eigen::Index>(p(i) * channels + c)) =
          z(static_cast<Eigen::Index>(i * channels + c));
    }
  }
  return out;
}

std::string to_string(const GroupElement& g) {
  return std::visit(
      Overloaded{
          [](const Permutation& p) { return "perm:" + p.to_string(); },
          [](const RotationStep& r) { return "step:" + std::to_string(r.step); },
          [](const RotationAngle& r) {
            std::ostringstream out;
            out.precision(17);
            out << "theta:" << r.theta;
            return out.str();
          },
      },
      g);
}

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::symmetric(std::size_t n) {
  if (n < 1) throw InputError("symmetric group needs n >= 1");
  return GroupSpec(Kind::symmetric, n, {});
}

GroupSpec GroupSpec::cyclic(std::size_t k, std::vector<int> frequencies) {
  if (k < 1) throw InputError("cyclic group needs k >= 1");
  if (frequencies.empty()) throw InputError("cyclic group needs at least one frequency block");
  for (int f : frequencies) {
    if (f < 0) throw InputError("frequencies must be non-negative");
  }
  return GroupSpec(Kind::cyclic, k, std::move(frequencies));
}

GroupSpec GroupSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "sym") {
    return symmetric(parse_size(parts[1], text));
  }
  if (parts.size() == 3 && parts[0] == "cyc") {
    const auto k = parse_size(parts[1], text);
    std::vector<int> freqs;
    for (auto token : split(parts[2], ',')) {
      if (!token.empty() && (token.front() == 'f' || token.front() == 'F')) token.remove_prefix(1);
      freqs.push_back(static_cast<int>(parse_size(token, text)));
    }
    return cyclic(k, std::move(freqs));
  }
  throw InputError("unrecognized group spec '" + std::string(text) +
                   "' (expected sym:<n> or cyc:<k>:<f0,f1,...>)");
}

std::optional<std::uint64_t> GroupSpec::order() const {
  if (kind_ == Kind::cyclic) return degree_;
  std::uint64_t result = 1;
  for (std::uint64_t i = 2; i <= degree_; ++i) {
    if (result > UINT64_MAX / i) return std::nullopt;
    result *= i;
  }
  return result;
}

std::size_t GroupSpec::dimension() const {
  if (kind_ == Kind::symmetric) return degree_;
  return frequency_layout_dimension(frequencies_);
}

std::string GroupSpec::to_string() const {
  if (kind_ == Kind::symmetric) return "sym:" + std::to_string(degree_);
  std::string out = "cyc:" + std::to_string(degree_) + ":";
  for (std::size_t i = 0; i < frequencies_.size(); ++i) {
    if (i) out += ',';
    out += 'f' + std::to_string(frequencies_[i]);
  }
  return out;
}

std::size_t frequency_layout_dimension(std::span<const int> frequencies) {
  std::size_t dim = 0;
  for (int f : frequencies) dim += (f == 0) ? 1 : 2;
  return dim;
}

// ---------------------------------------------------------------------------
// Enumeration and sampling

void for_each_element(const GroupSpec& spec,
                      const std::function<void(const GroupElement&)>& visit,
                      std::uint64_t cap) {
  const auto order = spec.order();
  if (!order || *order > cap) {
    throw CapacityError("group " + spec.to_string() + " has order " +
                        (order ? std::to_string(*order) : std::string("> 2^64")) +
                        ", above the enumeration cap of " + std::to_string(cap) +
                        "; use sampling instead");
  }
  if (spec.is_cyclic()) {
    for (std::size_t s = 0; s < spec.degree(); ++s) visit(RotationStep{s});
    return;
  }
  std::vector<std::size_t> image(spec.degree());
  std::iota(image.begin(), image.end(), std::size_t{0});
  do {
    visit(Permutation::from_image(image));
  } while (std::next_permutation(image.begin(), image.end()));
}

std::vector<GroupElement> enumerate_group(const GroupSpec& spec, std::uint64_t cap) {
  std::vector<GroupElement> out;
  for_each_element(spec, [&](const GroupElement& g) { out.push_back(g); }, cap);
  return out;
}

GroupElement identity_element(const GroupSpec& spec) {
  if (spec.is_symmetric()) return Permutation::identity(spec.degree());
  return RotationStep{0};
}

GroupElement compose(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  if (spec.is_symmetric()) {
    return as_permutation(a, "compose") * as_permutation(b, "compose");
  }
  const auto* ra = std::get_if<RotationStep>(&a);
  const auto* rb = std::get_if<RotationStep>(&b);
  if (!ra || !rb) throw InputError("compose: expected rotation steps");
  return RotationStep{(ra->step + rb->step) % spec.degree()};
}

GroupElement inverse(const GroupSpec& spec, const GroupElement& g) {
  if (spec.is_symmetric()) return as_permutation(g, "inverse").inverse();
  if (const auto* r = std::get_if<RotationStep>(&g)) {
    return RotationStep{(spec.degree() - r->step % spec.degree()) % spec.degree()};
  }
  if (const auto* a = std::get_if<RotationAngle>(&g)) return RotationAngle{-a->theta};
  throw InputError("inverse: element does not belong to " + spec.to_string());
}

Permutation random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  // Fisher-Yates from the back.
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(image[i - 1], image[pick(rng)]);
  }
  return Permutation::from_image(std::move(image));
}

GroupElement random_element(const GroupSpec& spec, Rng& rng) {
  if (spec.is_symmetric()) return random_permutation(spec.degree(), rng);
  std::uniform_int_distribution<std::size_t> pick(0, spec.degree() - 1);
  return RotationStep{pick(rng)};
}

GroupElement random_element(const GroupSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return random_element(spec, rng);
}

// ---------------------------------------------------------------------------
// Representations

Matrix rotation_matrix(std::span<const int> frequencies, double theta) {
  const auto dim = static_cast<Eigen::Index>(frequency_layout_dimension(frequencies));
  Matrix m = Matrix::Zero(dim, dim);
  Eigen::Index offset = 0;
  for (int f : frequencies) {
    if (f == 0) {
      m(offset, offset) = 1.0;
      offset += 1;
      continue;
    }
    const double c = std::cos(f * theta);
    const double s = std::sin(f * theta);
    m(offset, offset) = c;
    m(offset, offset + 1) = -s;
    m(offset + 1, offset) = s;
    m(offset + 1, offset + 1) = c;
    offset += 2;
  }
  return m;
}

Matrix rotation_block_matrix(const GroupSpec& spec, std::size_t step) {
  if (!spec.is_cyclic()) throw InputError("rotation_block_matrix needs a cyclic group spec");
  if (step >= spec.degree()) {
    throw InputError("rotation step " + std::to_string(step) + " out of range for " +
                     spec.to_string());
  }
  if (step == 0) {
    const auto dim = static_cast<Eigen::Index>(spec.dimension());
    return Matrix::Identity(dim, dim);
  }
  return rotation_matrix(spec.frequencies(), step_angle(spec, step));
}

Vector apply_rotation(std::span<const int> frequencies, double theta, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != frequency_layout_dimension(frequencies)) {
    throw DimensionError("vector of length " + std::to_string(z.size()) +
                         " does not match the frequency layout of dimension " +
                         std::to_string(frequency_layout_dimension(frequencies)));
  }
  Vector out(z.size());
  Eigen::Index offset = 0;
  for (int f : frequencies) {
    if (f == 0) {
      out(offset) = z(offset);
      offset += 1;
      continue;
    }
    const double c = std::cos(f * theta);
    const double s = std::sin(f * theta);
    out(offset) = c * z(offset) - s * z(offset + 1);
    out(offset + 1) = s * z(offset) + c * z(offset + 1);
    offset += 2;
  }
  return out;
}

Matrix representation_matrix(const GroupSpec& spec, const GroupElement& g, std::size_t dim) {
  if (spec.is_symmetric()) {
    const auto& p = as_permutation(g, "representation_matrix");
    if (dim % spec.degree() != 0 || dim == 0) {
      throw DimensionError("dimension " + std::to_string(dim) + " is not a multiple of n = " +
                           std::to_string(spec.degree()));
    }
    const std::size_t channels = dim / spec.degree();
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        m(static_cast<Eigen::Index>(p(i) * channels + c),
          static_cast<Eigen::Index>(i * channels + c)) = 1.0;
      }
    }
    return m;
  }
  if (dim != spec.dimension()) {
    throw DimensionError("dimension " + std::to_string(dim) + " does not match " +
                         spec.to_string());
  }
  if (const auto* r = std::get_if<RotationStep>(&g)) return rotation_block_matrix(spec, r->step);
  if (const auto* a = std::get_if<RotationAngle>(&g)) {
    return rotation_matrix(spec.frequencies(), a->theta);
  }
  throw InputError("representation_matrix: element does not belong to " + spec.to_string());
}

Vector act(const GroupSpec& spec, const GroupElement& g, const Vector& z) {
  if (spec.is_symmetric()) {
    const auto& p = as_permutation(g, "act");
    const auto len = static_cast<std::size_t>(z.size());
    if (p.size() != spec.degree() || len % spec.degree() != 0 || len == 0) {
      throw DimensionError("vector of length " + std::to_string(len) +
                           " does not match " + spec.to_string());
    }
    return apply_perm_rows(p, z, len / spec.degree());
  }
  if (const auto* r = std::get_if<RotationStep>(&g)) {
    if (r->step >= spec.degree()) throw InputError("rotation step out of range");
    return apply_rotation(spec.frequencies(), step_angle(spec, r->step), z);
  }
  if (const auto* a = std::get_if<RotationAngle>(&g)) {
    return apply_rotation(spec.frequencies(), a->theta, z);
  }
  throw InputError("act: element does not belong to " + spec.to_string());
}

}  // namespace equilens
