#pragma once

#include <span>
#include <string>

#include "equilens/group.hpp"

namespace equilens {

enum class DistanceMethod { bruteforce, sorted, rotation_opt };

std::string to_string(DistanceMethod method);

// d([z1], [z2]) = min_g ||z1 - g . z2|| together with the aligning element.
// Invariants: distance == ||z1 - minimizer . z2|| and distance <= ||z1 - z2||.
struct QuotientDistance {
  double distance = 0.0;
  GroupElement minimizer;
  DistanceMethod method = DistanceMethod::bruteforce;
};

// Exact minimum over full enumeration. Ties keep the first minimizer in
// enumeration order.
QuotientDistance quotient_dist_bruteforce(const Vector& z1, const Vector& z2,
                                          const GroupSpec& spec,
                                          std::uint64_t cap = kDefaultEnumerationCap);

// S_n acting on single-channel latents: the sorted representatives are an
// isometric cross section, so the distance is ||sort(z1) - sort(z2)||.
QuotientDistance quotient_dist_sorted(const Vector& z1, const Vector& z2);

inline constexpr std::size_t kDefaultRotationGrid = 720;

// Planar rotation acting through frequency blocks, minimized over the
// continuous angle: a uniform grid scan followed by golden-section
// refinement of every grid-local minimum.
QuotientDistance quotient_dist_rotation(const Vector& z1, const Vector& z2,
                                        std::span<const int> frequencies,
                                        std::size_t grid = kDefaultRotationGrid);

// Picks the exact fast path when one applies: sorted for single-channel
// symmetric actions, rotation alignment for cyclic layouts, brute force
// otherwise.
QuotientDistance quotient_dist_auto(const Vector& z1, const Vector& z2, const GroupSpec& spec);

}  // namespace equilens
