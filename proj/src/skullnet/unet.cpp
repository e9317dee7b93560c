#include "cq/skullnet/unet.hpp"

#include <cmath>

#include "cq/nk/layers.hpp"

namespace cq::skullnet {

using nk::Padding;
using nk::Tensor;

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    }
    return "Unknown";
}

std::vector<std::size_t> UNetConfig::scaled_widths() const
{
    std::vector<std::size_t> out;
    out.reserve(widths.size());
    for (std::size_t w : widths) {
        out.push_back(static_cast<std::size_t>(std::ceil(static_cast<double>(w) * width_scale - 1e-9)));
    }
    return out;
}

std::size_t UNetConfig::bottleneck_size() const
{
    return input_size >> (depth() - 1);
}

void UNetConfig::validate() const
{
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (widths.empty()) fail("at least one level is required");
    if (!(width_scale > 0.0)) fail("width_scale must be positive");
    for (std::size_t w : widths)
        if (w == 0) fail("widths must be positive");
    if (in_channels == 0 || out_channels == 0) fail("channel counts must be positive");
    const std::size_t step = std::size_t{1} << (depth() - 1);
    if (input_size == 0 || input_size % step != 0) {
        fail("input_size " + std::to_string(input_size) + " must be a positive multiple of " + std::to_string(step));
    }
    if (time_embed_dim % 2 != 0) fail("time_embed_dim must be even");
}

Tensor timestep_embedding(double t, std::size_t dim)
{
    Tensor e({dim});
    const std::size_t half = dim / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const double f = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
        e[i] = static_cast<float>(std::sin(t * f));
        e[i + half] = static_cast<float>(std::cos(t * f));
    }
    return e;
}

UNet::Conv UNet::make_conv(std::size_t cin, std::size_t cout, std::size_t k, nk::Rng& rng) const
{
    Conv c;
    c.w = Tensor({cout, cin, k, k});
    c.b = Tensor({cout});
    nk::glorot_uniform(c.w, cin * k * k, cout * k * k, rng);
    c.gw = Tensor(c.w.shape());
    c.gb = Tensor(c.b.shape());
    return c;
}

UNet::UNet(const UNetConfig& config, std::uint64_t seed) : config_(config)
{
    config_.validate();
    widths_ = config_.scaled_widths();
    nk::Rng rng = nk::Rng::derive(seed, "unet/init");
    const std::size_t depth = widths_.size();
    std::size_t cin = config_.in_channels;
    for (std::size_t l = 0; l < depth; ++l) {
        enc_.push_back({make_conv(cin, widths_[l], 3, rng), make_conv(widths_[l], widths_[l], 3, rng)});
        cin = widths_[l];
    }
    for (std::size_t l = 0; l + 1 < depth; ++l) {
        Conv up;
        up.w = Tensor({widths_[l + 1], widths_[l], 2, 2});
        up.b = Tensor({widths_[l]});
        nk::glorot_uniform(up.w, widths_[l + 1] * 4, widths_[l] * 4, rng);
        up.gw = Tensor(up.w.shape());
        up.gb = Tensor(up.b.shape());
        up_.push_back(std::move(up));
        dec_.push_back({make_conv(2 * widths_[l], widths_[l], 3, rng), make_conv(widths_[l], widths_[l], 3, rng)});
    }
    head_ = make_conv(widths_[0], config_.out_channels, 1, rng);
    if (config_.time_embed_dim > 0) {
        time_w_ = Tensor({widths_.back(), config_.time_embed_dim});
        time_b_ = Tensor({widths_.back()});
        nk::glorot_uniform(time_w_, config_.time_embed_dim, widths_.back(), rng);
        time_gw_ = Tensor(time_w_.shape());
        time_gb_ = Tensor(time_b_.shape());
    }
}

Tensor UNet::run_block(const std::array<Conv, 2>& convs, const Tensor& x, UNetCache::Block* block) const
{
    Tensor a1 = nk::conv2d(x, convs[0].w, convs[0].b, 1, Padding::Same);
    Tensor h1 = nk::relu(a1);
    Tensor a2 = nk::conv2d(h1, convs[1].w, convs[1].b, 1, Padding::Same);
    Tensor out = nk::relu(a2);
    if (block) {
        block->in = x;
        block->a1 = std::move(a1);
        block->h1 = std::move(h1);
        block->a2 = std::move(a2);
    }
    return out;
}

Tensor UNet::block_backward(std::array<Conv, 2>& convs, const UNetCache::Block& block, const Tensor& dy)
{
    const auto g2 = nk::conv2d_backward(block.h1, convs[1].w, nk::relu_backward(block.a2, dy), 1, Padding::Same);
    convs[1].gw += g2.dw;
    convs[1].gb += g2.db;
    const auto g1 = nk::conv2d_backward(block.in, convs[0].w, nk::relu_backward(block.a1, g2.dx), 1, Padding::Same);
    convs[0].gw += g1.dw;
    convs[0].gb += g1.db;
    return g1.dx;
}

Tensor UNet::forward(const Tensor& x, double timestep, UNetCache* cache) const
{
    const std::size_t s = config_.input_size;
    if (x.rank() != 3 || x.dim(0) != config_.in_channels || x.dim(1) != s || x.dim(2) != s) {
        throw Error(Errc::ShapeMismatch, "expected [" + std::to_string(config_.in_channels) + "," + std::to_string(s) +
                                             "," + std::to_string(s) + "], got " + nk::shape_str(x.shape()));
    }
    const std::size_t depth = widths_.size();
    UNetCache local;
    UNetCache& c = cache ? *cache : local;
    c.enc.assign(depth, {});
    c.enc_out.assign(depth, {});
    c.pool_arg.assign(depth, {});
    c.up_in.assign(depth, {});
    c.dec.assign(depth, {});

    Tensor cur = x;
    for (std::size_t l = 0; l < depth; ++l) {
        cur = run_block(enc_[l], cur, &c.enc[l]);
        if (l + 1 == depth && config_.time_embed_dim > 0) {
            c.temb = timestep_embedding(timestep, config_.time_embed_dim);
            const Tensor proj = nk::dense(c.temb, time_w_, time_b_);
            const std::size_t plane = cur.dim(1) * cur.dim(2);
            for (std::size_t ch = 0; ch < cur.dim(0); ++ch)
                for (std::size_t i = 0; i < plane; ++i) cur[ch * plane + i] += proj[ch];
        }
        c.enc_out[l] = cur;
        if (l + 1 < depth) cur = nk::maxpool2x2(cur, &c.pool_arg[l]);
    }
    for (std::size_t l = depth - 1; l-- > 0;) {
        c.up_in[l] = cur;
        const Tensor up = nk::conv_transpose2x2(cur, up_[l].w, up_[l].b);
        if (up.shape() != c.enc_out[l].shape()) {
            throw Error(Errc::ShapeMismatch, "skip connection " + nk::shape_str(c.enc_out[l].shape()) + " vs upsampled " +
                                                 nk::shape_str(up.shape()));
        }
        cur = run_block(dec_[l], nk::concat_channels(up, c.enc_out[l]), &c.dec[l]);
    }
    c.head_in = cur;
    return nk::conv2d(cur, head_.w, head_.b, 1, Padding::Same);
}

Tensor UNet::backward(const UNetCache& c, const Tensor& dy)
{
    const std::size_t depth = widths_.size();
    const auto gh = nk::conv2d_backward(c.head_in, head_.w, dy, 1, Padding::Same);
    head_.gw += gh.dw;
    head_.gb += gh.db;

    std::vector<Tensor> d_enc_out(depth);
    Tensor dcur = gh.dx;
    for (std::size_t l = 0; l + 1 < depth; ++l) {
        const Tensor dcat = block_backward(dec_[l], c.dec[l], dcur);
        auto [dup, dskip] = nk::split_channels(dcat, widths_[l]);
        d_enc_out[l] = std::move(dskip);
        const auto gu = nk::conv_transpose2x2_backward(c.up_in[l], up_[l].w, dup);
        up_[l].gw += gu.dw;
        up_[l].gb += gu.db;
        dcur = gu.dx;
    }
    d_enc_out[depth - 1] = std::move(dcur);

    if (config_.time_embed_dim > 0) {
        const Tensor& db = d_enc_out[depth - 1];
        const std::size_t plane = db.dim(1) * db.dim(2);
        Tensor dproj({db.dim(0)});
        for (std::size_t ch = 0; ch < db.dim(0); ++ch) {
            double s = 0.0;
            for (std::size_t i = 0; i < plane; ++i) s += db[ch * plane + i];
            dproj[ch] = static_cast<float>(s);
        }
        const auto gt = nk::dense_backward(c.temb, time_w_, dproj);
        time_gw_ += gt.dw;
        time_gb_ += gt.db;
    }

    Tensor dx;
    for (std::size_t l = depth; l-- > 0;) {
        const Tensor din = block_backward(enc_[l], c.enc[l], d_enc_out[l]);
        if (l == 0) {
            dx = din;
        } else {
            d_enc_out[l - 1] += nk::maxpool2x2_backward(c.enc_out[l - 1].shape(), c.pool_arg[l - 1], din);
        }
    }
    return dx;
}

std::vector<nk::ParamRef> UNet::params()
{
    std::vector<nk::ParamRef> p;
    auto add = [&p](const std::string& name, Conv& c) {
        p.push_back({name + ".w", &c.w, &c.gw});
        p.push_back({name + ".b", &c.b, &c.gb});
    };
    for (std::size_t l = 0; l < enc_.size(); ++l) {
        add("enc" + std::to_string(l) + ".conv0", enc_[l][0]);
        add("enc" + std::to_string(l) + ".conv1", enc_[l][1]);
    }
    for (std::size_t l = 0; l < up_.size(); ++l) {
        add("up" + std::to_string(l), up_[l]);
        add("dec" + std::to_string(l) + ".conv0", dec_[l][0]);
        add("dec" + std::to_string(l) + ".conv1", dec_[l][1]);
    }
    add("head", head_);
    if (config_.time_embed_dim > 0) {
        p.push_back({"time.w", &time_w_, &time_gw_});
        p.push_back({"time.b", &time_b_, &time_gb_});
    }
    return p;
}

std::size_t UNet::param_count()
{
    return nk::count_scalars(params());
}

void UNet::zero_grad()
{
    nk::zero_grads(params());
}

}  // namespace cq::skullnet
