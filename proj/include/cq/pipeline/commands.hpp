#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cq/pipeline/config.hpp"
#include "cq/pipeline/csv.hpp"
#include "cq/pipeline/dataset.hpp"
#include "cq/pipeline/report.hpp"

namespace cq::pipeline {

/// NIfTI volumes under <input_dir>/<label>/*.nii become
/// <output_dir>/<plane>/<label>/<stem>_<index>.pgm. Returns files per plane.
std::map<std::string, std::size_t> cmd_slice(const Config& config);

struct SegmentTrainResult {
    std::size_t epochs_run = 0;
    double holdout_dice = 0.0;
    double holdout_iou = 0.0;
};
/// Pairs from <data_dir>/images/*.pgm and <data_dir>/masks/*.pgm.
SegmentTrainResult cmd_segment_train(const Config& config);

/// Skull-strips every PGM under input_dir into the same layout under output_dir.
std::size_t cmd_segment_apply(const Config& config);

struct DiffuseTrainResult {
    std::filesystem::path checkpoint;
    int label = 0;
    std::size_t images = 0;
    double first_loss = 0.0;
    double last_loss = 0.0;
};
/// Trains on the train split of one (plane, label) group.
DiffuseTrainResult cmd_diffuse_train(const Config& config);

std::size_t cmd_diffuse_sample(const Config& config);

DatasetManifest cmd_build_dataset(const Config& config);

/// Classifier run: writes <output_dir>/epochs.csv, model.cqck and run.cfg.
/// task = segment | diffuse forwards to the matching command.
std::vector<EpochRow> cmd_train(const Config& config);

EpochRow cmd_evaluate(const Config& config);

std::vector<SummaryRow> cmd_report(const Config& config);

struct CommandSpec {
    std::string name;
    std::string summary;
    std::set<std::string> keys;
    /// Runs the command and returns a one-paragraph human summary.
    std::function<std::string(const Config&)> run;
};

const std::vector<CommandSpec>& command_table();
const CommandSpec* find_command(const std::string& name);

}  // namespace cq::pipeline
