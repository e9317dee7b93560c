#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cq/nk/metrics.hpp"
#include "cq/nk/optim.hpp"
#include "cq/skullnet/unet.hpp"
#include "cq/volio/image.hpp"

namespace cq::skullnet {

inline constexpr float kMaskThreshold = 0.5f;

struct MaskPair {
    volio::Image2D image;
    volio::Image2D mask;
};

struct SegEpoch {
    std::size_t epoch = 0;
    double loss = 0.0;
    /// Running overlap on the training pairs as seen during the epoch.
    double dice = 0.0;
    double iou = 0.0;
    /// Overlap on the held-out pairs after the epoch (NaN when none given).
    double holdout_dice = 0.0;
    double holdout_iou = 0.0;
    double wall_time_s = 0.0;
};

struct SegTrainOptions {
    std::size_t epochs = 30;
    std::size_t batch_size = 4;
    std::uint64_t seed = 0;
    /// Stop once held-out overlap reaches both targets (0 disables).
    double stop_dice = 0.0;
    double stop_iou = 0.0;
};

/// Minimizes BCE(sigmoid(logits), mask) + soft-Dice loss with per-batch
/// averaged gradients.
std::vector<SegEpoch> train_segmenter(UNet& net, std::span<const MaskPair> train, std::span<const MaskPair> holdout,
                                      nk::Optimizer& optimizer, const SegTrainOptions& options);

struct Segmentation {
    volio::Image2D mask;
    volio::Image2D stripped;
};

/// mask = sigmoid(logits) >= 0.5, stripped = image * mask.
Segmentation segment_apply(const UNet& net, const volio::Image2D& image);

/// Element-wise image * binarized mask.
volio::Image2D apply_mask(const volio::Image2D& image, const volio::Image2D& mask);

/// Mean per-image Dice and IoU of the predicted masks.
nk::Overlap evaluate_segmenter(const UNet& net, std::span<const MaskPair> pairs);

}  // namespace cq::skullnet
