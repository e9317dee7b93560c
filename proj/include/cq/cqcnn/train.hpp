#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cq/cqcnn/model.hpp"
#include "cq/nk/metrics.hpp"
#include "cq/nk/optim.hpp"
#include "cq/volio/image.hpp"

namespace cq::cqcnn {

/// Label 1 is the positive class.
struct Sample {
    volio::Image2D image;
    int label = 0;
};

struct EpochReport {
    double loss = 0.0;
    double train_acc = 0.0;
    double wall_time_s = 0.0;
};

/// One pass over `data` in an order shuffled from (seed, epoch), updating
/// after every batch_size samples. loss and train_acc are running values
/// taken before each update.
EpochReport train_epoch(CqcnnModel& model, std::span<const Sample> data, nk::Optimizer& optimizer,
                        std::uint64_t seed, std::size_t epoch);

struct Evaluation {
    nk::ConfusionCounts counts;
    nk::ClassificationMetrics metrics;
    double loss = 0.0;
};

/// Eval mode, prediction = argmax(gamma).
Evaluation evaluate(const CqcnnModel& model, std::span<const Sample> data);

int predicted_class(const nk::Tensor& gamma);

}  // namespace cq::cqcnn
