#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cq/nk/optim.hpp"
#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"

namespace cq::skullnet {

enum class Errc { InvalidConfig, EmptyDataset, ShapeMismatch };

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

/// Encoder widths per level; the last level is the bottleneck. Every
/// level has two 3x3 same-padded conv+relu layers; 2x2 max pooling sits
/// between levels and 2x2 stride-2 transposed convs upsample in the decoder.
struct UNetConfig {
    std::size_t input_size = 128;
    std::vector<std::size_t> widths{32, 64, 128, 256, 512};
    double width_scale = 1.0;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    /// Sinusoidal timestep embedding size; 0 builds an unconditioned net.
    std::size_t time_embed_dim = 0;

    /// ceil(w * width_scale) per level.
    std::vector<std::size_t> scaled_widths() const;
    std::size_t depth() const noexcept { return widths.size(); }
    std::size_t bottleneck_size() const;
    void validate() const;
};

/// sin(t f_i) for the first half, cos(t f_i) for the second, f_i = 10000^(-i/half).
nk::Tensor timestep_embedding(double t, std::size_t dim);

struct UNetCache {
    struct Block {
        nk::Tensor in, a1, h1, a2;
    };
    std::vector<Block> enc;
    std::vector<nk::Tensor> enc_out;
    std::vector<std::vector<std::uint32_t>> pool_arg;
    std::vector<nk::Tensor> up_in;
    std::vector<Block> dec;
    nk::Tensor head_in;
    nk::Tensor temb;
};

class UNet {
public:
    UNet(const UNetConfig& config, std::uint64_t seed);

    const UNetConfig& config() const noexcept { return config_; }

    /// x [in_channels, S, S] -> logits [out_channels, S, S]. `timestep` is
    /// only read when the net is time-conditioned.
    nk::Tensor forward(const nk::Tensor& x, double timestep = 0.0, UNetCache* cache = nullptr) const;

    /// Accumulates parameter gradients for upstream dy; returns dL/dx.
    nk::Tensor backward(const UNetCache& cache, const nk::Tensor& dy);

    std::vector<nk::ParamRef> params();
    std::size_t param_count();
    void zero_grad();

private:
    struct Conv {
        nk::Tensor w, b, gw, gb;
    };

    Conv make_conv(std::size_t cin, std::size_t cout, std::size_t k, nk::Rng& rng) const;
    nk::Tensor run_block(const std::array<Conv, 2>& convs, const nk::Tensor& x, UNetCache::Block* block) const;
    nk::Tensor block_backward(std::array<Conv, 2>& convs, const UNetCache::Block& block, const nk::Tensor& dy);

    UNetConfig config_;
    std::vector<std::size_t> widths_;
    std::vector<std::array<Conv, 2>> enc_;
    std::vector<Conv> up_;
    std::vector<std::array<Conv, 2>> dec_;
    Conv head_;
    nk::Tensor time_w_, time_b_, time_gw_, time_gb_;
};

}  // namespace cq::skullnet
