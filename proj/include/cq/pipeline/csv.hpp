#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cq::pipeline {

/// One line of the per-epoch classifier log.
struct EpochRow {
    std::string run;
    std::string plane;
    bool skull_stripped = false;
    std::size_t qubits = 0;  // 0 for the classical head
    std::uint64_t seed = 0;
    std::size_t epoch = 0;
    std::string split;  // train | test
    double loss = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double specificity = 0.0;
    double epoch_time_s = 0.0;
};

inline constexpr std::string_view kEpochHeader =
    "run,plane,skull_stripped,qubits,seed,epoch,split,loss,accuracy,precision,recall,f1,specificity,epoch_time_s";

std::string format_row(const EpochRow& row);
std::string format_rows(const std::vector<EpochRow>& rows);
std::vector<EpochRow> parse_epoch_csv(std::string_view text);
std::vector<EpochRow> load_epoch_csv(const std::filesystem::path& path);

/// Round-trip-exact decimal form of a double.
std::string format_number(double v);

/// Splits one CSV line on commas (no quoting; the schemas never need it).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace cq::pipeline
