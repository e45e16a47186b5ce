#pragma once

// CSV and JSON writers. Every file carries the tool version, the config hash
// and the parameter echo; nothing run-dependent (paths, job count, clock).

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinsq/config.hpp"

namespace spinsq {

inline constexpr const char *tool_version = "0.1.0";

struct Metadata {
  std::string kind;  // which artifact the file holds
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<std::string> defaulted;
  std::vector<std::pair<std::string, std::string>> notes;

  Metadata &note(const std::string &key, const std::string &value);
  Metadata &note(const std::string &key, double value);
};

Metadata make_metadata(const ScenarioConfig &config, const std::string &kind);

/// Shortest-exact text for a double ("%.17g").
std::string format_double(double v);

/// Column-major table; every column must have the same length.
void write_csv(const std::filesystem::path &path, const Metadata &meta,
               const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &columns);

/// Body plus a "metadata" object.
void write_json(const std::filesystem::path &path, const Metadata &meta,
                nlohmann::json body);

}  // namespace spinsq
