#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace equilens {

struct CheckOutcome {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Property suites run by the `selftest` command.
CheckOutcome check_sort_isometry(std::uint64_t seed);       // sorted == brute force, n = 2..7
CheckOutcome check_projection_invariance(std::uint64_t seed);
CheckOutcome check_convex_cone(std::uint64_t seed);
CheckOutcome check_sort_nonexpansive(std::uint64_t seed);
CheckOutcome check_partition_basis(std::uint64_t seed);     // counts and equivariance
CheckOutcome check_gradients(std::uint64_t seed);
CheckOutcome check_rotation_distance(std::uint64_t seed);   // against a dense grid

using CheckCallback = std::function<void(const CheckOutcome&)>;

std::vector<CheckOutcome> run_selftest(std::uint64_t seed, const CheckCallback& on_check = {});

}  // namespace equilens
