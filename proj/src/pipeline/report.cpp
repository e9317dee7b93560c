#include "cq/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "cq/pipeline/error.hpp"
#include "cq/pipeline/files.hpp"

namespace cq::pipeline {

MeanStd mean_std(const std::vector<double>& values)
{
    MeanStd r;
    if (values.empty()) return r;
    double sum = 0.0;
    for (double v : values) sum += v;
    r.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return r;
}

namespace {

int plane_rank(const std::string& p)
{
    if (p == "axial") return 0;
    if (p == "coronal") return 1;
    if (p == "sagittal") return 2;
    if (p == "3plane") return 3;
    return 4;
}

struct RunStats {
    std::size_t final_epoch = 0;
    const EpochRow* final_test = nullptr;
    double train_time = 0.0;
    std::size_t first_reach = 0;
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<EpochRow>& rows, double threshold)
{
    using Key = std::tuple<int, std::string, bool, std::size_t>;
    std::map<Key, std::map<std::string, RunStats>> groups;
    for (const auto& r : rows) {
        // Skull-stripped rows sort first.
        auto& run = groups[Key{plane_rank(r.plane), r.plane, !r.skull_stripped, r.qubits}][r.run];
        if (r.split == "train") {
            run.train_time += r.epoch_time_s;
            if (r.accuracy >= threshold && (run.first_reach == 0 || r.epoch < run.first_reach)) run.first_reach = r.epoch;
        } else if (r.split == "test" && r.epoch >= run.final_epoch) {
            run.final_epoch = r.epoch;
            run.final_test = &r;
        }
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, runs] : groups) {
        SummaryRow s;
        s.plane = std::get<1>(key);
        s.skull_stripped = !std::get<2>(key);
        s.qubits = std::get<3>(key);
        std::vector<double> loss, acc, prec, rec, f1, spec, time, reach;
        for (const auto& [name, st] : runs) {
            if (!st.final_test) continue;
            loss.push_back(st.final_test->loss);
            acc.push_back(st.final_test->accuracy);
            prec.push_back(st.final_test->precision);
            rec.push_back(st.final_test->recall);
            f1.push_back(st.final_test->f1);
            spec.push_back(st.final_test->specificity);
            time.push_back(st.train_time);
            if (st.first_reach > 0) reach.push_back(static_cast<double>(st.first_reach));
        }
        if (acc.empty()) continue;
        s.runs = acc.size();
        s.loss = mean_std(loss);
        s.accuracy = mean_std(acc);
        s.precision = mean_std(prec);
        s.recall = mean_std(rec);
        s.f1 = mean_std(f1);
        s.specificity = mean_std(spec);
        s.train_time_s = mean_std(time);
        s.reached = reach.size();
        s.epochs_to_threshold = reach.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_std(reach).mean;
        out.push_back(s);
    }
    return out;
}

std::string format_summary(const std::vector<SummaryRow>& rows)
{
    std::string out(kSummaryHeader);
    out += '\n';
    auto ms = [](const MeanStd& m) { return format_number(m.mean) + "," + format_number(m.std); };
    for (const auto& r : rows) {
        out += r.plane + "," + (r.skull_stripped ? "true" : "false") + "," + std::to_string(r.qubits) + "," +
               std::to_string(r.runs) + "," + ms(r.loss) + "," + ms(r.accuracy) + "," + ms(r.precision) + "," +
               ms(r.recall) + "," + ms(r.f1) + "," + ms(r.specificity) + "," + ms(r.train_time_s) + "," +
               format_hms(r.train_time_s.mean) + "," +
               (std::isnan(r.epochs_to_threshold) ? std::string() : format_number(r.epochs_to_threshold)) + "," +
               std::to_string(r.reached) + "\n";
    }
    return out;
}

std::vector<SummaryRow> report_runs(const std::vector<std::filesystem::path>& run_dirs, double threshold)
{
    std::vector<EpochRow> rows;
    for (const auto& dir : run_dirs) {
        const auto path = dir / "epochs.csv";
        if (!std::filesystem::is_regular_file(path)) continue;
        auto r = load_epoch_csv(path);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    auto summary = summarize(rows, threshold);
    if (summary.empty()) throw Error(Errc::NoRuns, "no completed runs with test rows");
    return summary;
}

}  // namespace cq::pipeline
