#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace equilens::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Written to "<primary output>.manifest.json" after a command succeeds.
// Only the wall-clock field varies between identical runs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void add_seed(const std::string& name, std::uint64_t value);
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  std::string dump() const;
  void write(const std::filesystem::path& primary_output) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, sha256
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace equilens::cli
