#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"

namespace cq::diffusion {

enum class Errc { BadRange, BadTimestep, EmptyBatch, ShapeMismatch };

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Timesteps run 1..T; the vectors are indexed by t-1.
struct NoiseSchedule {
    std::size_t T = 0;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;

    double beta_at(std::size_t t) const { return beta.at(t - 1); }
    double alpha_at(std::size_t t) const { return alpha.at(t - 1); }
    double alpha_bar_at(std::size_t t) const { return alpha_bar.at(t - 1); }
};

/// Linear beta from beta_start (t=1) to beta_end (t=T).
NoiseSchedule build_schedule(std::size_t T, double beta_start, double beta_end);

/// Linear 1e-4..0.02 at T=1000. Shorter schedules scale both endpoints by
/// 1000/T so that alpha_bar_T stays near zero.
NoiseSchedule default_schedule(std::size_t T = 1000);

/// x_t = sqrt(alpha_t) x_{t-1} + sqrt(1 - alpha_t) eps.
nk::Tensor forward_step(const nk::Tensor& x_prev, std::size_t t, const NoiseSchedule& schedule, nk::Rng& rng);

struct Noised {
    nk::Tensor x_t;
    nk::Tensor eps;
};

/// x_t = sqrt(alpha_bar_t) x_0 + sqrt(1 - alpha_bar_t) eps, returning the eps used.
Noised forward_jump(const nk::Tensor& x0, std::size_t t, const NoiseSchedule& schedule, nk::Rng& rng);

}  // namespace cq::diffusion
