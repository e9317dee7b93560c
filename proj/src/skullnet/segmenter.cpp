#include "cq/skullnet/segmenter.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "cq/nk/layers.hpp"
#include "cq/nk/losses.hpp"

namespace cq::skullnet {

namespace {

nk::Tensor to_tensor(const volio::Image2D& img)
{
    return nk::Tensor({1, img.height, img.width}, img.pixels);
}

volio::Image2D binarize_logits(const nk::Tensor& logits, std::size_t w, std::size_t h)
{
    volio::Image2D m(w, h);
    for (std::size_t i = 0; i < m.pixels.size(); ++i) m.pixels[i] = nk::sigmoid(logits[i]) >= kMaskThreshold ? 1.0f : 0.0f;
    return m;
}

void require_pair(const MaskPair& p)
{
    if (p.image.width != p.mask.width || p.image.height != p.mask.height) {
        throw Error(Errc::ShapeMismatch, "image and mask dimensions differ");
    }
}

}  // namespace

volio::Image2D apply_mask(const volio::Image2D& image, const volio::Image2D& mask)
{
    if (image.width != mask.width || image.height != mask.height) {
        throw Error(Errc::ShapeMismatch, "image and mask dimensions differ");
    }
    volio::Image2D out(image.width, image.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = mask.pixels[i] >= kMaskThreshold ? image.pixels[i] : 0.0f;
    }
    return out;
}

Segmentation segment_apply(const UNet& net, const volio::Image2D& image)
{
    const nk::Tensor logits = net.forward(to_tensor(image));
    Segmentation s;
    s.mask = binarize_logits(logits, image.width, image.height);
    s.stripped = apply_mask(image, s.mask);
    return s;
}

nk::Overlap evaluate_segmenter(const UNet& net, std::span<const MaskPair> pairs)
{
    if (pairs.empty()) throw Error(Errc::EmptyDataset, "no pairs to evaluate");
    nk::Overlap mean;
    for (const MaskPair& p : pairs) {
        require_pair(p);
        const auto o = nk::dice_iou(segment_apply(net, p.image).mask.pixels, p.mask.pixels);
        mean.dice += o.dice;
        mean.iou += o.iou;
    }
    mean.dice /= static_cast<double>(pairs.size());
    mean.iou /= static_cast<double>(pairs.size());
    return mean;
}

std::vector<SegEpoch> train_segmenter(UNet& net, std::span<const MaskPair> train, std::span<const MaskPair> holdout,
                                      nk::Optimizer& optimizer, const SegTrainOptions& options)
{
    if (train.empty()) throw Error(Errc::EmptyDataset, "no training pairs");
    if (options.batch_size == 0) throw Error(Errc::InvalidConfig, "batch_size must be positive");
    for (const MaskPair& p : train) require_pair(p);

    auto params = net.params();
    std::vector<SegEpoch> log;
    std::vector<std::size_t> order(train.size());
    UNetCache cache;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        nk::Rng rng = nk::Rng::derive(options.seed, "skullnet/shuffle/epoch" + std::to_string(epoch));
        std::iota(order.begin(), order.end(), 0);
        nk::shuffle(order, rng);

        SegEpoch rec;
        rec.epoch = epoch + 1;
        net.zero_grad();
        std::size_t in_batch = 0;
        for (std::size_t n = 0; n < order.size(); ++n) {
            const MaskPair& p = train[order[n]];
            const nk::Tensor target = to_tensor(p.mask);
            const nk::Tensor logits = net.forward(to_tensor(p.image), 0.0, &cache);
            auto bce = nk::bce_with_logits(logits, target);
            const auto dice = nk::soft_dice_loss(logits, target);
            rec.loss += bce.loss + dice.loss;
            bce.grad += dice.grad;
            net.backward(cache, bce.grad);

            const auto o = nk::dice_iou(binarize_logits(logits, p.image.width, p.image.height).pixels, p.mask.pixels);
            rec.dice += o.dice;
            rec.iou += o.iou;

            if (++in_batch == options.batch_size || n + 1 == order.size()) {
                if (in_batch > 1) {
                    for (auto& prm : params) *prm.grad *= 1.0f / static_cast<float>(in_batch);
                }
                optimizer.step(params);
                net.zero_grad();
                in_batch = 0;
            }
        }
        const double n = static_cast<double>(train.size());
        rec.loss /= n;
        rec.dice /= n;
        rec.iou /= n;
        if (!holdout.empty()) {
            const auto o = evaluate_segmenter(net, holdout);
            rec.holdout_dice = o.dice;
            rec.holdout_iou = o.iou;
        } else {
            rec.holdout_dice = rec.holdout_iou = std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log.push_back(rec);
        const bool targets_set = options.stop_dice > 0.0 || options.stop_iou > 0.0;
        if (targets_set && !holdout.empty() && rec.holdout_dice >= options.stop_dice &&
            rec.holdout_iou >= options.stop_iou) {
            break;
        }
    }
    return log;
}

}  // namespace cq::skullnet
