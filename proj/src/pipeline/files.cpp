#include "cq/pipeline/files.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cq/pipeline/error.hpp"

namespace cq::pipeline {

namespace fs = std::filesystem;

std::vector<fs::path> list_files(const fs::path& dir, std::string_view extension, bool recursive)
{
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    auto take = [&](const fs::directory_entry& e) {
        if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
    };
    if (recursive) {
        for (const auto& e : fs::recursive_directory_iterator(dir)) take(e);
    } else {
        for (const auto& e : fs::directory_iterator(dir)) take(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, std::string_view text)
{
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_dir(const fs::path& dir, const std::string& what)
{
    if (!fs::is_directory(dir)) throw Error(Errc::InvalidConfig, what + " is not a directory: " + dir.string());
}

void require_file(const fs::path& path, const std::string& what)
{
    if (!fs::is_regular_file(path)) throw Error(Errc::InvalidConfig, what + " not found: " + path.string());
}

std::string format_hms(double seconds)
{
    const long long total = std::llround(std::max(0.0, seconds));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", total / 3600, (total / 60) % 60, total % 60);
    return buf;
}

}  // namespace cq::pipeline
