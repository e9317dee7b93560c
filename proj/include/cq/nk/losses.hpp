#pragma once

#include <span>

#include "cq/nk/tensor.hpp"

namespace cq::nk {

/// Probabilities are clamped to [kCrossEntropyEps, 1] before the log.
inline constexpr float kCrossEntropyEps = 1e-7f;

struct LossAndGrad {
    double loss = 0.0;
    Tensor grad;
};

/// -sum_c y_c log(gamma_c) for one sample; grad is -y_c / max(gamma_c, eps).
LossAndGrad cross_entropy(const Tensor& gamma, const Tensor& one_hot);
/// Batch mean of the per-sample loss.
double cross_entropy_mean(std::span<const Tensor> gammas, std::span<const Tensor> one_hots);
Tensor one_hot(std::size_t label, std::size_t classes);

/// Mean over elements of binary cross-entropy between sigmoid(logits) and
/// targets in {0,1}; gradient is w.r.t. the logits.
LossAndGrad bce_with_logits(const Tensor& logits, const Tensor& targets);

/// 1 - (2 sum(p m) + 1) / (sum p + sum m + 1) with p = sigmoid(logits);
/// lies in [0,1). Gradient w.r.t. the logits.
LossAndGrad soft_dice_loss(const Tensor& logits, const Tensor& targets);

/// sum of squared differences (no averaging), gradient w.r.t. prediction.
LossAndGrad squared_error(const Tensor& prediction, const Tensor& target);

}  // namespace cq::nk
