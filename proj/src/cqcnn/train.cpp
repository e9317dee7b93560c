#include "cq/cqcnn/train.hpp"

#include <chrono>
#include <numeric>
#include <string>

#include "cq/nk/losses.hpp"

namespace cq::cqcnn {

int predicted_class(const nk::Tensor& gamma)
{
    return gamma[1] > gamma[0] ? 1 : 0;
}

EpochReport train_epoch(CqcnnModel& model, std::span<const Sample> data, nk::Optimizer& optimizer,
                        std::uint64_t seed, std::size_t epoch)
{
    if (data.empty()) throw Error(Errc::EmptyDataset, "training set is empty");
    const auto start = std::chrono::steady_clock::now();
    const std::string tag = "/epoch" + std::to_string(epoch);
    nk::Rng order_rng = nk::Rng::derive(seed, "cqcnn/shuffle" + tag);
    nk::Rng drop_rng = nk::Rng::derive(seed, "cqcnn/dropout" + tag);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    nk::shuffle(order, order_rng);

    const std::size_t batch = model.config().batch_size;
    auto params = model.params();
    model.zero_grad();

    double loss_sum = 0.0;
    std::size_t correct = 0, in_batch = 0;
    ForwardCache cache;
    for (std::size_t n = 0; n < order.size(); ++n) {
        const Sample& s = data[order[n]];
        const nk::Tensor gamma = model.forward(s.image, nk::Mode::Train, drop_rng, &cache);
        const auto ce = nk::cross_entropy(gamma, nk::one_hot(static_cast<std::size_t>(s.label), 2));
        loss_sum += ce.loss;
        if (predicted_class(gamma) == s.label) ++correct;
        model.backward(cache, ce.grad);
        if (++in_batch == batch || n + 1 == order.size()) {
            if (in_batch > 1) {
                for (auto& p : params) *p.grad *= 1.0f / static_cast<float>(in_batch);
            }
            optimizer.step(params);
            model.zero_grad();
            in_batch = 0;
        }
    }

    EpochReport r;
    r.loss = loss_sum / static_cast<double>(data.size());
    r.train_acc = static_cast<double>(correct) / static_cast<double>(data.size());
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Evaluation evaluate(const CqcnnModel& model, std::span<const Sample> data)
{
    if (data.empty()) throw Error(Errc::EmptyDataset, "evaluation set is empty");
    Evaluation ev;
    double loss_sum = 0.0;
    for (const Sample& s : data) {
        const nk::Tensor gamma = model.predict(s.image);
        loss_sum += nk::cross_entropy(gamma, nk::one_hot(static_cast<std::size_t>(s.label), 2)).loss;
        ev.counts.add(predicted_class(gamma), s.label);
    }
    ev.loss = loss_sum / static_cast<double>(data.size());
    ev.metrics = nk::classify_metrics(ev.counts);
    return ev;
}

}  // namespace cq::cqcnn
