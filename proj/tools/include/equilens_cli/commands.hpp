#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equilens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// Runs one command line (args[0] is the program name). Library errors and
// bad arguments return 1, anything unexpected returns 2.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// --threads when given, otherwise EQUILENS_THREADS, otherwise 1.
std::size_t resolve_threads(std::optional<std::size_t> flag);

// "3", "1,5,10" or "1..20".
std::vector<std::size_t> parse_k_values(std::string_view text);

}  // namespace equilens::cli
