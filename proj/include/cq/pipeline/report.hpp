#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cq/pipeline/csv.hpp"

namespace cq::pipeline {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample (n-1) deviation; 0 for a single value
};

MeanStd mean_std(const std::vector<double>& values);

/// Table-2 style row: one configuration aggregated over its runs (seeds).
struct SummaryRow {
    std::string plane;
    bool skull_stripped = false;
    std::size_t qubits = 0;
    std::size_t runs = 0;
    MeanStd loss, accuracy, precision, recall, f1, specificity;
    MeanStd train_time_s;
    /// Mean first epoch whose train accuracy reached the threshold, over the
    /// runs that reached it; NaN when none did.
    double epochs_to_threshold = 0.0;
    std::size_t reached = 0;
};

inline constexpr std::string_view kSummaryHeader =
    "plane,skull_stripped,qubits,runs,loss_mean,loss_std,accuracy_mean,accuracy_std,precision_mean,precision_std,"
    "recall_mean,recall_std,f1_mean,f1_std,specificity_mean,specificity_std,train_time_s_mean,train_time_s_std,"
    "train_time_hms,epochs_to_threshold,reached_threshold";

/// Groups rows by (plane, skull_stripped, qubits); within a group each run
/// contributes its final-epoch test metrics and its summed train time.
std::vector<SummaryRow> summarize(const std::vector<EpochRow>& rows, double threshold = 0.95);

std::string format_summary(const std::vector<SummaryRow>& rows);

/// Reads `epochs.csv` from every run directory. Throws NoRuns when nothing
/// usable is found.
std::vector<SummaryRow> report_runs(const std::vector<std::filesystem::path>& run_dirs, double threshold = 0.95);

}  // namespace cq::pipeline
