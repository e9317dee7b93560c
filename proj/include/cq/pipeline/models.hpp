#pragma once

#include <memory>

#include "cq/cqcnn/model.hpp"
#include "cq/diffusion/predictor.hpp"
#include "cq/diffusion/schedule.hpp"
#include "cq/pipeline/checkpoint.hpp"
#include "cq/skullnet/unet.hpp"

namespace cq::pipeline {

/// Checkpoints carry their architecture as one-element "meta.*" tensors so
/// that a model can be rebuilt from the file alone.
enum class ModelKind { Cqcnn = 1, UNet = 2, Diffusion = 3 };

ModelKind checkpoint_kind(const TensorMap& map);

TensorMap save_cqcnn(cqcnn::CqcnnModel& model);
cqcnn::CqcnnModel load_cqcnn(const TensorMap& map);

TensorMap save_unet(skullnet::UNet& net);
skullnet::UNet load_unet(const TensorMap& map);

struct DiffusionModel {
    std::unique_ptr<diffusion::UNetPredictor> predictor;
    diffusion::NoiseSchedule schedule;
    float beta_start = 0.0f;
    float beta_end = 0.0f;
    int label = 0;
};

/// Linear schedule from float-rounded endpoints, so that training and a
/// reloaded checkpoint use the same betas.
diffusion::NoiseSchedule stored_schedule(std::size_t T, float beta_start, float beta_end);

TensorMap save_diffusion(DiffusionModel& model);
DiffusionModel load_diffusion(const TensorMap& map);

}  // namespace cq::pipeline
