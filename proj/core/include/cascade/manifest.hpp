#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cascade/config.hpp"

namespace cascade {

using Diagnostic = std::variant<bool, std::int64_t, double, std::string>;

struct RunManifest {
    std::string model;
    std::uint64_t seed = 0;
    std::string config_text; // to_config_text of the config actually run
    std::string started_at;  // UTC, ISO 8601
    std::string finished_at;
    double wall_seconds = 0.0;
    std::vector<std::string> files; // relative to the output directory
    std::string version;
    std::map<std::string, Diagnostic> diagnostics;
};

std::string software_version();

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Files listed in the manifest that do not exist under `dir`.
std::vector<std::string> missing_files(const RunManifest& m, const std::filesystem::path& dir);

} // namespace cascade
