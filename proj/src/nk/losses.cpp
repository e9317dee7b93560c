#include "cq/nk/losses.hpp"

#include <algorithm>
#include <cmath>

#include "cq/nk/layers.hpp"

namespace cq::nk {

LossAndGrad cross_entropy(const Tensor& gamma, const Tensor& one_hot)
{
    require_same_shape(gamma, one_hot, "cross_entropy");
    LossAndGrad out{0.0, Tensor(gamma.shape())};
    for (std::size_t c = 0; c < gamma.size(); ++c) {
        const float g = std::clamp(gamma[c], kCrossEntropyEps, 1.0f);
        out.loss -= static_cast<double>(one_hot[c]) * std::log(static_cast<double>(g));
        out.grad[c] = -one_hot[c] / g;
    }
    return out;
}

double cross_entropy_mean(std::span<const Tensor> gammas, std::span<const Tensor> one_hots)
{
    if (gammas.size() != one_hots.size() || gammas.empty()) throw ShapeError("cross_entropy_mean: batch mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < gammas.size(); ++i) sum += cross_entropy(gammas[i], one_hots[i]).loss;
    return sum / static_cast<double>(gammas.size());
}

Tensor one_hot(std::size_t label, std::size_t classes)
{
    if (label >= classes) throw ShapeError("one_hot: label out of range");
    Tensor t({classes});
    t[label] = 1.0f;
    return t;
}

LossAndGrad bce_with_logits(const Tensor& logits, const Tensor& targets)
{
    require_same_shape(logits, targets, "bce_with_logits");
    LossAndGrad out{0.0, Tensor(logits.shape())};
    const double n = static_cast<double>(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        const double t = targets[i];
        // max(z,0) - z t + log(1 + e^-|z|)
        out.loss += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
        out.grad[i] = static_cast<float>((sigmoid(logits[i]) - t) / n);
    }
    out.loss /= n;
    return out;
}

LossAndGrad soft_dice_loss(const Tensor& logits, const Tensor& targets)
{
    require_same_shape(logits, targets, "soft_dice_loss");
    constexpr double smooth = 1.0;
    std::vector<double> p(logits.size());
    double inter = 0.0, sum_p = 0.0, sum_m = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = sigmoid(logits[i]);
        inter += p[i] * targets[i];
        sum_p += p[i];
        sum_m += targets[i];
    }
    const double num = 2.0 * inter + smooth;
    const double den = sum_p + sum_m + smooth;
    LossAndGrad out{1.0 - num / den, Tensor(logits.shape())};
    for (std::size_t i = 0; i < logits.size(); ++i) {
        // d(num/den)/dp_i = (2 m_i den - num) / den^2
        const double dratio = (2.0 * targets[i] * den - num) / (den * den);
        out.grad[i] = static_cast<float>(-dratio * p[i] * (1.0 - p[i]));
    }
    return out;
}

LossAndGrad squared_error(const Tensor& prediction, const Tensor& target)
{
    require_same_shape(prediction, target, "squared_error");
    LossAndGrad out{0.0, Tensor(prediction.shape())};
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = static_cast<double>(prediction[i]) - target[i];
        out.loss += d * d;
        out.grad[i] = static_cast<float>(2.0 * d);
    }
    return out;
}

}  // namespace cq::nk
