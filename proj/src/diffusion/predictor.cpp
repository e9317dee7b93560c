#include "cq/diffusion/predictor.hpp"

#include "cq/diffusion/schedule.hpp"

namespace cq::diffusion {

skullnet::UNetConfig NoisePredictorConfig::unet_config() const
{
    skullnet::UNetConfig c;
    c.input_size = image_size;
    c.widths = widths;
    c.time_embed_dim = time_embed_dim;
    return c;
}

namespace {

struct UNetTrace : NoisePredictor::Trace {
    skullnet::UNetCache cache;
};

}  // namespace

UNetPredictor::UNetPredictor(const NoisePredictorConfig& config, std::uint64_t seed)
    : config_(config), net_(config.unet_config(), seed)
{
}

nk::Tensor UNetPredictor::forward(const nk::Tensor& x_t, std::size_t t, std::unique_ptr<Trace>* trace) const
{
    const std::size_t s = config_.image_size;
    if (x_t.shape() != nk::Shape{1, s, s}) throw Error(Errc::ShapeMismatch, "input " + nk::shape_str(x_t.shape()));
    if (!trace) return net_.forward(x_t, static_cast<double>(t));
    auto tr = std::make_unique<UNetTrace>();
    nk::Tensor y = net_.forward(x_t, static_cast<double>(t), &tr->cache);
    *trace = std::move(tr);
    return y;
}

void UNetPredictor::backward(const Trace& trace, const nk::Tensor& dy)
{
    net_.backward(static_cast<const UNetTrace&>(trace).cache, dy);
}

}  // namespace cq::diffusion
