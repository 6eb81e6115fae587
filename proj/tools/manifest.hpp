#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrition/io.hpp"

namespace attrition::cli {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);
// UTC, second resolution, ISO 8601.
std::string utc_now();

struct RunManifest {
  std::string command;
  std::vector<std::string> args;  // argv after the program name
  std::string config;             // every resolved option value, TOML
  std::string input_path;
  std::string input_digest;       // sha256 of the input bytes
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
  std::string started, finished;
  std::vector<std::string> outputs;  // file names inside the output directory

  io::Json to_json() const;
  static RunManifest from_json(const io::Json& doc);
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace attrition::cli
