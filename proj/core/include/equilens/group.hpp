#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "equilens/linalg.hpp"

namespace equilens {

using Rng = std::mt19937_64;

// Largest group that may be fully enumerated (8!).
inline constexpr std::uint64_t kDefaultEnumerationCap = 40320;

// A permutation of {0, ..., n-1} stored as its forward image: position i is
// sent to image[i]. Acting on a vector moves z[i] to slot image[i].
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(std::size_t n);
  // Throws InputError unless `image` is a bijection on {0, ..., n-1}.
  static Permutation from_image(std::vector<std::size_t> image);
  static Permutation transposition(std::size_t n, std::size_t a, std::size_t b);

  std::size_t size() const { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_[i]; }
  std::span<const std::size_t> image() const { return image_; }

  Permutation inverse() const;
  bool is_identity() const;

  // P with P(image[i], i) = 1, so that P * z == apply_perm_vector(*this, z).
  Matrix matrix() const;

  std::string to_string() const;

  // (a * b) acts as "b first, then a".
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {}
  std::vector<std::size_t> image_;
};

// output[p(i)] = z[i].
Vector apply_perm_vector(const Permutation& p, const Vector& z);

// Permutes the node axis of a node-major layout with `channels` values per
// node: entry i*channels + c moves to p(i)*channels + c.
Vector apply_perm_rows(const Permutation& p, const Vector& z, std::size_t channels);

// Element of a cyclic group C_k: rotation by 2*pi*step/k.
struct RotationStep {
  std::size_t step = 0;
  friend bool operator==(const RotationStep&, const RotationStep&) = default;
};

// Continuous planar rotation angle (radians); produced by rotation
// alignment, never enumerated.
struct RotationAngle {
  double theta = 0.0;
  friend bool operator==(const RotationAngle&, const RotationAngle&) = default;
};

using GroupElement = std::variant<Permutation, RotationStep, RotationAngle>;

std::string to_string(const GroupElement& g);

class GroupSpec {
 public:
  enum class Kind { symmetric, cyclic };

  // S_n acting on node-major layouts of n rows.
  static GroupSpec symmetric(std::size_t n);
  // C_k acting through frequency blocks: frequency 0 is a fixed 1-dim block,
  // frequency f >= 1 a 2-dim block rotated by f * theta.
  static GroupSpec cyclic(std::size_t k, std::vector<int> frequencies);

  // Compact grammar: "sym:6" or "cyc:360:f0,f1,f1" (the 'f' prefix is optional).
  static GroupSpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_symmetric() const { return kind_ == Kind::symmetric; }
  bool is_cyclic() const { return kind_ == Kind::cyclic; }

  // Symmetric degree n (or cyclic order k).
  std::size_t degree() const { return degree_; }
  std::span<const int> frequencies() const { return frequencies_; }

  // Group order, or nullopt when it does not fit in 64 bits.
  std::optional<std::uint64_t> order() const;

  // Dimension of the represented space: n for symmetric (one channel),
  // (#zero freqs) + 2 * (#nonzero freqs) for cyclic.
  std::size_t dimension() const;

  std::string to_string() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  GroupSpec(Kind kind, std::size_t degree, std::vector<int> frequencies)
      : kind_(kind), degree_(degree), frequencies_(std::move(frequencies)) {}

  Kind kind_ = Kind::symmetric;
  std::size_t degree_ = 1;
  std::vector<int> frequencies_;
};

// Layout dimension of a frequency list.
std::size_t frequency_layout_dimension(std::span<const int> frequencies);

// Visits every group element exactly once in canonical order (lexicographic
// permutations; ascending rotation step). Throws CapacityError when the
// order exceeds `cap`.
void for_each_element(const GroupSpec& spec,
                      const std::function<void(const GroupElement&)>& visit,
                      std::uint64_t cap = kDefaultEnumerationCap);

std::vector<GroupElement> enumerate_group(const GroupSpec& spec,
                                          std::uint64_t cap = kDefaultEnumerationCap);

GroupElement identity_element(const GroupSpec& spec);
GroupElement compose(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupSpec& spec, const GroupElement& g);

// Uniform draw; deterministic for a fixed seed.
GroupElement random_element(const GroupSpec& spec, std::uint64_t seed);
GroupElement random_element(const GroupSpec& spec, Rng& rng);
Permutation random_permutation(std::size_t n, Rng& rng);

// Block-diagonal representation matrix of a cyclic group element.
Matrix rotation_block_matrix(const GroupSpec& spec, std::size_t step);
// Same layout for a continuous angle.
Matrix rotation_matrix(std::span<const int> frequencies, double theta);
// R(theta) * z without materializing the matrix.
Vector apply_rotation(std::span<const int> frequencies, double theta, const Vector& z);

// Representation matrix rho(g) on a space of dimension `dim` (for symmetric
// groups dim must be a multiple of n; extra factors are channels).
Matrix representation_matrix(const GroupSpec& spec, const GroupElement& g, std::size_t dim);

// g . z for any supported action. Symmetric groups accept node-major layouts
// of length n * channels.
Vector act(const GroupSpec& spec, const GroupElement& g, const Vector& z);

}  // namespace equilens
