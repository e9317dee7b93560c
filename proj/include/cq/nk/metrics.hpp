#pragma once

#include <cstdint>
#include <span>

namespace cq::nk {

/// Binary confusion counts; class 1 is the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    void add(int predicted, int actual) noexcept;
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double specificity = 0.0;
};

/// Any ratio with a zero denominator is reported as 0.
ClassificationMetrics classify_metrics(const ConfusionCounts& counts);

struct Overlap {
    double dice = 0.0;
    double iou = 0.0;
};

/// Masks are binarized at 0.5. Both masks empty gives (1, 1).
Overlap dice_iou(std::span<const float> predicted, std::span<const float> truth);

}  // namespace cq::nk
