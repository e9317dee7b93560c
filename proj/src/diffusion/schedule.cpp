#include "cq/diffusion/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace cq::diffusion {

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::BadRange: return "BadRange";
    case Errc::BadTimestep: return "BadTimestep";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    }
    return "Unknown";
}

NoiseSchedule build_schedule(std::size_t T, double beta_start, double beta_end)
{
    if (T < 1) throw Error(Errc::BadRange, "T must be at least 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw Error(Errc::BadRange, "need 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    double prod = 1.0;
    for (std::size_t i = 0; i < T; ++i) {
        const double frac = T == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(T - 1);
        s.beta[i] = beta_start + (beta_end - beta_start) * frac;
        s.alpha[i] = 1.0 - s.beta[i];
        prod *= s.alpha[i];
        s.alpha_bar[i] = prod;
    }
    return s;
}

NoiseSchedule default_schedule(std::size_t T)
{
    if (T < 1) throw Error(Errc::BadRange, "T must be at least 1");
    const double scale = 1000.0 / static_cast<double>(T);
    const double end = std::min(0.02 * scale, 0.999);
    const double start = std::min(1e-4 * scale, end);
    return build_schedule(T, start, end);
}

namespace {

void check_t(std::size_t t, const NoiseSchedule& s)
{
    if (t < 1 || t > s.T) {
        throw Error(Errc::BadTimestep, "t=" + std::to_string(t) + " outside 1.." + std::to_string(s.T));
    }
}

}  // namespace

nk::Tensor forward_step(const nk::Tensor& x_prev, std::size_t t, const NoiseSchedule& schedule, nk::Rng& rng)
{
    check_t(t, schedule);
    const double a = std::sqrt(schedule.alpha_at(t));
    const double b = std::sqrt(1.0 - schedule.alpha_at(t));
    nk::Tensor out(x_prev.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>(a * x_prev[i] + b * rng.normal());
    }
    return out;
}

Noised forward_jump(const nk::Tensor& x0, std::size_t t, const NoiseSchedule& schedule, nk::Rng& rng)
{
    check_t(t, schedule);
    const double a = std::sqrt(schedule.alpha_bar_at(t));
    const double b = std::sqrt(1.0 - schedule.alpha_bar_at(t));
    Noised n{nk::Tensor(x0.shape()), nk::Tensor(x0.shape())};
    for (std::size_t i = 0; i < x0.size(); ++i) {
        const double e = rng.normal();
        n.eps[i] = static_cast<float>(e);
        n.x_t[i] = static_cast<float>(a * x0[i] + b * e);
    }
    return n;
}

}  // namespace cq::diffusion
