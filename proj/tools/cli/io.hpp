#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cohemark::cli {

/// Non-blank lines, trimmed. Throws IoFailure when the file cannot be read.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// One JSON value per non-blank line. Throws InvalidArgument on malformed lines.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Writes `content` to `path` (truncating). Throws IoFailure.
void write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace cohemark::cli
