#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cq::pipeline {

/// `key = value` lines, `#` starts a comment. Keys outside `allowed` are
/// rejected, as are repeated keys.
class Config {
public:
    Config() = default;

    static Config parse(std::string_view text, const std::set<std::string>& allowed);
    static Config load(const std::filesystem::path& path, const std::set<std::string>& allowed);

    /// Applies a `key=value` override; the key must be allowed.
    void set(const std::string& key, const std::string& value, const std::set<std::string>& allowed);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& require(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; blanks dropped.
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    /// Canonical `key = value` text, sorted by key.
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace cq::pipeline
