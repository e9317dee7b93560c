#include "cq/diffusion/ddpm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace cq::diffusion {

double batch_loss(NoisePredictor& predictor, std::span<const nk::Tensor> x0, const NoiseSchedule& schedule,
                  nk::Rng& rng, bool accumulate)
{
    if (x0.empty()) throw Error(Errc::EmptyBatch, "no images in batch");
    const double inv_b = 1.0 / static_cast<double>(x0.size());
    double total = 0.0;
    for (const auto& img : x0) {
        const std::size_t t = 1 + rng.below(schedule.T);
        const Noised n = forward_jump(img, t, schedule, rng);
        std::unique_ptr<NoisePredictor::Trace> trace;
        const nk::Tensor pred = predictor.forward(n.x_t, t, accumulate ? &trace : nullptr);
        nk::Tensor dy(pred.shape());
        double sq = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = static_cast<double>(pred[i]) - n.eps[i];
            sq += d * d;
            dy[i] = static_cast<float>(2.0 * d * inv_b);
        }
        total += sq;
        if (accumulate && trace) predictor.backward(*trace, dy);
    }
    return total * inv_b;
}

double train_step(NoisePredictor& predictor, std::span<const nk::Tensor> x0, const NoiseSchedule& schedule,
                  nk::Optimizer& optimizer, nk::Rng& rng)
{
    predictor.zero_grad();
    const double loss = batch_loss(predictor, x0, schedule, rng, true);
    optimizer.step(predictor.params());
    return loss;
}

std::vector<DiffusionEpoch> train(NoisePredictor& predictor, std::span<const nk::Tensor> images,
                                  const NoiseSchedule& schedule, nk::Optimizer& optimizer,
                                  const DiffusionTrainOptions& options)
{
    if (images.empty()) throw Error(Errc::EmptyBatch, "no training images");
    const std::size_t bs = std::max<std::size_t>(1, options.batch_size);
    std::vector<std::size_t> order(images.size());
    std::vector<DiffusionEpoch> log;
    for (std::size_t e = 1; e <= options.epochs; ++e) {
        const auto start = std::chrono::steady_clock::now();
        const std::string tag = "epoch" + std::to_string(e);
        nk::Rng shuffle_rng = nk::Rng::derive(options.seed, "diffusion/shuffle/" + tag);
        nk::Rng noise_rng = nk::Rng::derive(options.seed, "diffusion/noise/" + tag);
        std::iota(order.begin(), order.end(), std::size_t{0});
        nk::shuffle(order, shuffle_rng);
        double weighted = 0.0;
        std::vector<nk::Tensor> batch;
        for (std::size_t b = 0; b < order.size(); b += bs) {
            batch.clear();
            for (std::size_t i = b; i < std::min(order.size(), b + bs); ++i) batch.push_back(images[order[i]]);
            weighted += train_step(predictor, batch, schedule, optimizer, noise_rng) * static_cast<double>(batch.size());
        }
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        log.push_back({e, weighted / static_cast<double>(order.size()), dt.count()});
    }
    return log;
}

nk::Tensor sample_model_range(const NoisePredictor& predictor, const NoiseSchedule& schedule, const nk::Shape& shape,
                              nk::Rng& rng)
{
    nk::Tensor x(shape);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.normal());
    for (std::size_t t = schedule.T; t >= 1; --t) {
        const nk::Tensor eps = predictor.forward(x, t);
        const double alpha = schedule.alpha_at(t);
        const double beta = schedule.beta_at(t);
        const double coef = beta / std::sqrt(1.0 - schedule.alpha_bar_at(t));
        const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
        const double sigma = t > 1 ? std::sqrt(beta) : 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double v = inv_sqrt_alpha * (x[i] - coef * eps[i]);
            if (t > 1) v += sigma * rng.normal();
            x[i] = static_cast<float>(v);
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], -1.0f, 1.0f);
    return x;
}

nk::Tensor sample(const NoisePredictor& predictor, const NoiseSchedule& schedule, const nk::Shape& shape, nk::Rng& rng)
{
    nk::Tensor x = sample_model_range(predictor, schedule, shape, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5f * (x[i] + 1.0f);
    return x;
}

nk::Tensor to_model_range(const volio::Image2D& image)
{
    nk::Tensor t({1, image.height, image.width});
    for (std::size_t i = 0; i < image.pixels.size(); ++i) t[i] = 2.0f * image.pixels[i] - 1.0f;
    return t;
}

volio::Image2D from_unit_tensor(const nk::Tensor& t)
{
    const auto& s = t.shape();
    if (s.size() != 3 || s[0] != 1) throw Error(Errc::ShapeMismatch, "expected [1, H, W], got " + nk::shape_str(s));
    volio::Image2D img(s[2], s[1]);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = std::clamp(t[i], 0.0f, 1.0f);
    return img;
}

}  // namespace cq::diffusion
