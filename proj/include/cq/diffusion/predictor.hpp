#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "cq/nk/optim.hpp"
#include "cq/nk/tensor.hpp"
#include "cq/skullnet/unet.hpp"

namespace cq::diffusion {

/// eps-prediction network interface. Implementations without parameters
/// (test doubles) can ignore the trace and backward.
class NoisePredictor {
public:
    struct Trace {
        virtual ~Trace() = default;
    };

    virtual ~NoisePredictor() = default;

    /// x_t [1, S, S] -> eps_hat [1, S, S]. When `trace` is given it receives
    /// whatever backward() needs.
    virtual nk::Tensor forward(const nk::Tensor& x_t, std::size_t t, std::unique_ptr<Trace>* trace = nullptr) const = 0;
    /// Accumulates parameter gradients for upstream dy.
    virtual void backward(const Trace& /*trace*/, const nk::Tensor& /*dy*/) {}
    virtual std::vector<nk::ParamRef> params() { return {}; }
    void zero_grad() { nk::zero_grads(params()); }
};

struct NoisePredictorConfig {
    std::size_t image_size = 8;
    std::vector<std::size_t> widths{16, 32};
    std::size_t time_embed_dim = 16;

    std::size_t depth() const noexcept { return widths.size(); }
    skullnet::UNetConfig unet_config() const;
};

/// Small time-conditioned U-Net; the embedding is added after the bottleneck.
class UNetPredictor : public NoisePredictor {
public:
    UNetPredictor(const NoisePredictorConfig& config, std::uint64_t seed);

    nk::Tensor forward(const nk::Tensor& x_t, std::size_t t, std::unique_ptr<Trace>* trace = nullptr) const override;
    void backward(const Trace& trace, const nk::Tensor& dy) override;
    std::vector<nk::ParamRef> params() override { return net_.params(); }

    const NoisePredictorConfig& config() const noexcept { return config_; }
    skullnet::UNet& net() noexcept { return net_; }

private:
    NoisePredictorConfig config_;
    skullnet::UNet net_;
};

}  // namespace cq::diffusion
