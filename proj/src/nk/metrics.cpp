#include "cq/nk/metrics.hpp"

#include "cq/nk/tensor.hpp"

namespace cq::nk {

void ConfusionCounts::add(int predicted, int actual) noexcept
{
    if (predicted == 1 && actual == 1) ++tp;
    else if (predicted == 1) ++fp;
    else if (actual == 1) ++fn;
    else ++tn;
}

namespace {
double ratio(double num, double den)
{
    return den == 0.0 ? 0.0 : num / den;
}
}  // namespace

ClassificationMetrics classify_metrics(const ConfusionCounts& c)
{
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    ClassificationMetrics m;
    m.accuracy = ratio(tp + tn, tp + fp + tn + fn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

Overlap dice_iou(std::span<const float> predicted, std::span<const float> truth)
{
    if (predicted.size() != truth.size()) throw ShapeError("dice_iou: mask sizes differ");
    std::uint64_t a = 0, b = 0, both = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] >= 0.5f;
        const bool t = truth[i] >= 0.5f;
        a += p;
        b += t;
        both += (p && t);
    }
    if (a + b == 0) return {1.0, 1.0};
    const double inter = static_cast<double>(both);
    return {2.0 * inter / static_cast<double>(a + b), inter / static_cast<double>(a + b - both)};
}

}  // namespace cq::nk
