#include "cq/pipeline/csv.hpp"

#include <charconv>
#include <cstdio>

#include "cq/pipeline/error.hpp"
#include "cq/pipeline/files.hpp"

namespace cq::pipeline {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

std::string format_row(const EpochRow& r)
{
    return r.run + "," + r.plane + "," + (r.skull_stripped ? "true" : "false") + "," + std::to_string(r.qubits) + "," +
           std::to_string(r.seed) + "," + std::to_string(r.epoch) + "," + r.split + "," + format_number(r.loss) + "," +
           format_number(r.accuracy) + "," + format_number(r.precision) + "," + format_number(r.recall) + "," +
           format_number(r.f1) + "," + format_number(r.specificity) + "," + format_number(r.epoch_time_s);
}

std::string format_rows(const std::vector<EpochRow>& rows)
{
    std::string out(kEpochHeader);
    out += '\n';
    for (const auto& r : rows) out += format_row(r) + "\n";
    return out;
}

namespace {

double to_double(const std::string& s)
{
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw Error(Errc::InvalidConfig, "bad number in CSV: '" + s + "'");
    }
}

std::uint64_t to_uint(const std::string& s)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw Error(Errc::InvalidConfig, "bad integer in CSV: '" + s + "'");
    return v;
}

}  // namespace

std::vector<EpochRow> parse_epoch_csv(std::string_view text)
{
    std::vector<EpochRow> rows;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        if (header) {
            std::string_view h = line;
            if (!h.empty() && h.back() == '\r') h.remove_suffix(1);
            if (h != kEpochHeader) throw Error(Errc::InvalidConfig, "unexpected CSV header");
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 14) throw Error(Errc::InvalidConfig, "CSV row has " + std::to_string(f.size()) + " fields");
        EpochRow r;
        r.run = f[0];
        r.plane = f[1];
        r.skull_stripped = f[2] == "true";
        r.qubits = to_uint(f[3]);
        r.seed = to_uint(f[4]);
        r.epoch = to_uint(f[5]);
        r.split = f[6];
        r.loss = to_double(f[7]);
        r.accuracy = to_double(f[8]);
        r.precision = to_double(f[9]);
        r.recall = to_double(f[10]);
        r.f1 = to_double(f[11]);
        r.specificity = to_double(f[12]);
        r.epoch_time_s = to_double(f[13]);
        rows.push_back(std::move(r));
    }
    if (header) throw Error(Errc::InvalidConfig, "empty CSV");
    return rows;
}

std::vector<EpochRow> load_epoch_csv(const std::filesystem::path& path)
{
    return parse_epoch_csv(read_text(path));
}

}  // namespace cq::pipeline
