#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace gcf::cli {

inline constexpr const char* kVersionTag = "gcf 0.1.0";

/// Shortest round-trip decimal form; NaN prints as the empty string.
std::string fmt_double(double v);

/// Writes a CSV table: header row, LF endings, '.' decimal point.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Writes the run record: version, command, seed, config echo, tolerance set,
/// and the result payload. Deterministic byte-for-byte for a fixed config.
void write_run_json(const std::string& path, const std::string& command,
                    const nlohmann::json& config_echo, const nlohmann::json& tolerances,
                    std::uint64_t seed, const nlohmann::json& results);

/// Creates the directory (and parents) if needed.
void ensure_dir(const std::string& dir);

} // namespace gcf::cli
