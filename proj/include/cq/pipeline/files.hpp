#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cq::pipeline {

/// Regular files under `dir` (recursively) with the given extension,
/// sorted by path so every listing is reproducible.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, std::string_view extension,
                                              bool recursive = true);

void ensure_dir(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Checks existence up front so commands fail before doing any work.
void require_dir(const std::filesystem::path& dir, const std::string& what);
void require_file(const std::filesystem::path& path, const std::string& what);

/// hh:mm:ss, hours unbounded.
std::string format_hms(double seconds);

}  // namespace cq::pipeline
