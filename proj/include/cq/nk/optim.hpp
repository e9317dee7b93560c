#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cq/nk/tensor.hpp"

namespace cq::nk {

/// A named trainable tensor and its gradient buffer, owned elsewhere.
struct ParamRef {
    std::string name;
    Tensor* value;
    Tensor* grad;
};

void zero_grads(std::span<const ParamRef> params);
std::size_t count_scalars(std::span<const ParamRef> params);

struct AdamState {
    long t = 0;
    Tensor m;
    Tensor v;
    float lr = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

struct SgdState {
    float lr = 1e-2f;
};

struct RmspropState {
    Tensor v;
    float lr = 1e-3f;
    float rho = 0.9f;
    float eps = 1e-8f;
};

struct AdagradState {
    Tensor acc;
    float lr = 1e-2f;
    float eps = 1e-10f;
};

// Moment buffers are created lazily on the first step to match the parameter.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state);
void sgd_step(Tensor& param, const Tensor& grad, const SgdState& state);
void rmsprop_step(Tensor& param, const Tensor& grad, RmspropState& state);
void adagrad_step(Tensor& param, const Tensor& grad, AdagradState& state);

enum class OptimizerKind { Adam, Sgd, RmsProp, Adagrad };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

/// One state slot per parameter tensor, addressed by position in the
/// ParamRef list handed to step(); the list must keep the same order.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, float lr);

    void step(std::span<const ParamRef> params);
    OptimizerKind kind() const noexcept { return kind_; }
    float lr() const noexcept { return lr_; }

private:
    using State = std::variant<AdamState, SgdState, RmspropState, AdagradState>;
    State fresh_state() const;

    OptimizerKind kind_;
    float lr_;
    std::vector<State> states_;
};

}  // namespace cq::nk
