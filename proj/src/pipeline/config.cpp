#include "cq/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cq/pipeline/error.hpp"

namespace cq::pipeline {

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::MissingKey: return "MissingKey";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingDiffusionModel: return "MissingDiffusionModel";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::Truncated: return "Truncated";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::NoRuns: return "NoRuns";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

bool is_validation(Errc code) noexcept
{
    return code == Errc::InvalidConfig || code == Errc::UnknownKey || code == Errc::MissingKey;
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Config Config::parse(std::string_view text, const std::set<std::string>& allowed)
{
    Config c;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": empty key");
        if (c.has(key)) throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": repeated key " + key);
        c.set(key, value, allowed);
    }
    return c;
}

Config Config::load(const std::filesystem::path& path, const std::set<std::string>& allowed)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidConfig, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), allowed);
}

void Config::set(const std::string& key, const std::string& value, const std::set<std::string>& allowed)
{
    if (!allowed.count(key)) throw Error(Errc::UnknownKey, key);
    values_[key] = value;
}

const std::string& Config::require(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw Error(Errc::MissingKey, key);
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& s)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(Errc::InvalidConfig, key + ": not a number: '" + s + "'");
    }
    return v;
}

}  // namespace

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const
{
    return has(key) ? parse_number<std::int64_t>(key, values_.at(key)) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const
{
    return has(key) ? parse_number<std::uint64_t>(key, values_.at(key)) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const
{
    if (!has(key)) return fallback;
    const std::string& s = values_.at(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::InvalidConfig, key + ": not a number: '" + s + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key)) return fallback;
    const std::string& s = values_.at(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw Error(Errc::InvalidConfig, key + ": expected true/false, got '" + s + "'");
}

std::vector<std::string> Config::get_list(const std::string& key, const std::vector<std::string>& fallback) const
{
    if (!has(key)) return fallback;
    std::vector<std::string> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string Config::to_text() const
{
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

}  // namespace cq::pipeline
