#include "equilens_cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <nlohmann/json.hpp>

#include "equilens/error.hpp"
#include "equilens_cli/table.hpp"

#ifndef EQUILENS_VERSION
#define EQUILENS_VERSION "unknown"
#endif

namespace equilens::cli {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_seed(const std::string& name, std::uint64_t value) {
  seeds_.emplace_back(name, value);
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), sha256_file(path));
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }

std::string RunManifest::dump() const {
  nlohmann::ordered_json doc;
  doc["format"] = "equilens-manifest/1";
  doc["tool_version"] = EQUILENS_VERSION;
  doc["command"] = command_;
  doc["argv"] = argv_;
  auto& seeds = doc["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : seeds_) seeds[name] = value;
  auto& inputs = doc["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : inputs_) inputs.push_back({{"path", path}, {"sha256", digest}});
  doc["outputs"] = outputs_;
  doc["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return doc.dump(1) + "\n";
}

void RunManifest::write(const std::filesystem::path& primary_output) const {
  write_text_file(primary_output.string() + ".manifest.json", dump());
}

}  // namespace equilens::cli
