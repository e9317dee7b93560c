#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cq/diffusion/predictor.hpp"
#include "cq/diffusion/schedule.hpp"
#include "cq/nk/optim.hpp"
#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"
#include "cq/volio/image.hpp"

namespace cq::diffusion {

/// Mean over the batch of sum_pixels (eps_hat - eps)^2 at t ~ U{1..T}.
/// Gradients are accumulated into the predictor but no step is taken.
double batch_loss(NoisePredictor& predictor, std::span<const nk::Tensor> x0, const NoiseSchedule& schedule,
                  nk::Rng& rng, bool accumulate);

/// One optimizer step on the batch loss; returns the loss.
double train_step(NoisePredictor& predictor, std::span<const nk::Tensor> x0, const NoiseSchedule& schedule,
                  nk::Optimizer& optimizer, nk::Rng& rng);

struct DiffusionTrainOptions {
    std::size_t epochs = 500;
    std::size_t batch_size = 8;
    std::uint64_t seed = 0;
};

struct DiffusionEpoch {
    std::size_t epoch = 0;
    double loss = 0.0;
    double wall_time_s = 0.0;
};

/// Shuffled mini-batch epochs over images already in model range.
std::vector<DiffusionEpoch> train(NoisePredictor& predictor, std::span<const nk::Tensor> images,
                                  const NoiseSchedule& schedule, nk::Optimizer& optimizer,
                                  const DiffusionTrainOptions& options);

/// Ancestral sampling from x_T ~ N(0, I) with sigma_t^2 = beta_t and no
/// noise at t = 1. The result is in model range [-1, 1].
nk::Tensor sample_model_range(const NoisePredictor& predictor, const NoiseSchedule& schedule, const nk::Shape& shape,
                              nk::Rng& rng);

/// sample_model_range mapped to [0, 1].
nk::Tensor sample(const NoisePredictor& predictor, const NoiseSchedule& schedule, const nk::Shape& shape, nk::Rng& rng);

/// [0,1] image -> [1, H, W] tensor in [-1, 1], and back (clamped).
nk::Tensor to_model_range(const volio::Image2D& image);
volio::Image2D from_unit_tensor(const nk::Tensor& t);

}  // namespace cq::diffusion
