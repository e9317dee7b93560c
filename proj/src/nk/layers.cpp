#include "cq/nk/layers.hpp"

#include <algorithm>
#include <cmath>

namespace cq::nk {

namespace {

struct ConvGeometry {
    std::size_t cin, h, w, cout, k, ho, wo;
    long pad;
    int stride;
};

ConvGeometry conv_geometry(const Shape& x, const Shape& w, int stride, Padding pad)
{
    if (x.size() != 3) throw ShapeError("conv2d: input must be [C,H,W], got " + shape_str(x));
    if (w.size() != 4 || w[2] != w[3]) throw ShapeError("conv2d: weights must be [C_out,C_in,K,K], got " + shape_str(w));
    if (w[1] != x[0]) throw ShapeError("conv2d: weight C_in " + std::to_string(w[1]) + " != input channels " + std::to_string(x[0]));
    if (stride < 1) throw ShapeError("conv2d: stride must be >= 1");
    ConvGeometry g{x[0], x[1], x[2], w[0], w[2], 0, 0, 0, stride};
    if (pad == Padding::Same) {
        if (g.k % 2 == 0 || stride != 1) throw ShapeError("conv2d: same padding needs odd K and stride 1");
        g.pad = static_cast<long>((g.k - 1) / 2);
        g.ho = g.h;
        g.wo = g.w;
    } else {
        if (g.k > g.h || g.k > g.w) throw ShapeError("conv2d: kernel larger than input " + shape_str(x));
        if ((g.h - g.k) % stride != 0 || (g.w - g.k) % stride != 0) {
            throw ShapeError("conv2d: stride does not divide (H-K) for input " + shape_str(x));
        }
        g.ho = (g.h - g.k) / stride + 1;
        g.wo = (g.w - g.k) / stride + 1;
    }
    return g;
}

// Range of output columns ox whose input column ox*stride + kx - pad lies in [0, w).
std::pair<long, long> valid_cols(const ConvGeometry& g, long kx)
{
    long lo = 0;
    long hi = static_cast<long>(g.wo);
    if (g.stride == 1) {
        lo = std::max(0L, g.pad - kx);
        hi = std::min(hi, static_cast<long>(g.w) + g.pad - kx);
    }
    return {lo, std::max(lo, hi)};
}

}  // namespace

Shape conv2d_output_shape(const Shape& x, const Shape& w, int stride, Padding pad)
{
    auto g = conv_geometry(x, w, stride, pad);
    return {g.cout, g.ho, g.wo};
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, Padding pad)
{
    const auto g = conv_geometry(x.shape(), w.shape(), stride, pad);
    require_shape(b, {g.cout}, "conv2d bias");
    Tensor y({g.cout, g.ho, g.wo});
    const float* xp = x.ptr();
    const float* wp = w.ptr();
    float* yp = y.ptr();
    for (std::size_t oc = 0; oc < g.cout; ++oc) {
        float* yc = yp + oc * g.ho * g.wo;
        std::fill(yc, yc + g.ho * g.wo, b[oc]);
        for (std::size_t ic = 0; ic < g.cin; ++ic) {
            const float* xc = xp + ic * g.h * g.w;
            for (std::size_t ky = 0; ky < g.k; ++ky) {
                for (std::size_t kx = 0; kx < g.k; ++kx) {
                    const float wv = wp[((oc * g.cin + ic) * g.k + ky) * g.k + kx];
                    const auto [lo, hi] = valid_cols(g, static_cast<long>(kx));
                    for (std::size_t oy = 0; oy < g.ho; ++oy) {
                        const long iy = static_cast<long>(oy) * stride + static_cast<long>(ky) - g.pad;
                        if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
                        float* yr = yc + oy * g.wo;
                        const float* xr = xc + iy * g.w;
                        if (stride == 1) {
                            const long off = static_cast<long>(kx) - g.pad;
                            for (long ox = lo; ox < hi; ++ox) yr[ox] += wv * xr[ox + off];
                        } else {
                            for (std::size_t ox = 0; ox < g.wo; ++ox) yr[ox] += wv * xr[ox * stride + kx];
                        }
                    }
                }
            }
        }
    }
    return y;
}

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride, Padding pad)
{
    const auto g = conv_geometry(x.shape(), w.shape(), stride, pad);
    require_shape(dy, {g.cout, g.ho, g.wo}, "conv2d_backward upstream");
    Conv2dGrads out{Tensor(x.shape()), Tensor(w.shape()), Tensor({g.cout})};
    const float* xp = x.ptr();
    const float* wp = w.ptr();
    const float* dyp = dy.ptr();
    float* dxp = out.dx.ptr();
    float* dwp = out.dw.ptr();
    for (std::size_t oc = 0; oc < g.cout; ++oc) {
        const float* dyc = dyp + oc * g.ho * g.wo;
        double db = 0.0;
        for (std::size_t i = 0; i < g.ho * g.wo; ++i) db += dyc[i];
        out.db[oc] = static_cast<float>(db);
        for (std::size_t ic = 0; ic < g.cin; ++ic) {
            const float* xc = xp + ic * g.h * g.w;
            float* dxc = dxp + ic * g.h * g.w;
            for (std::size_t ky = 0; ky < g.k; ++ky) {
                for (std::size_t kx = 0; kx < g.k; ++kx) {
                    const std::size_t widx = ((oc * g.cin + ic) * g.k + ky) * g.k + kx;
                    const float wv = wp[widx];
                    const auto [lo, hi] = valid_cols(g, static_cast<long>(kx));
                    double acc = 0.0;
                    for (std::size_t oy = 0; oy < g.ho; ++oy) {
                        const long iy = static_cast<long>(oy) * stride + static_cast<long>(ky) - g.pad;
                        if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
                        const float* dyr = dyc + oy * g.wo;
                        const float* xr = xc + iy * g.w;
                        float* dxr = dxc + iy * g.w;
                        if (stride == 1) {
                            const long off = static_cast<long>(kx) - g.pad;
                            float row = 0.0f;
                            for (long ox = lo; ox < hi; ++ox) row += dyr[ox] * xr[ox + off];
                            acc += row;
                            for (long ox = lo; ox < hi; ++ox) dxr[ox + off] += wv * dyr[ox];
                        } else {
                            for (std::size_t ox = 0; ox < g.wo; ++ox) {
                                acc += static_cast<double>(dyr[ox]) * xr[ox * stride + kx];
                                dxr[ox * stride + kx] += wv * dyr[ox];
                            }
                        }
                    }
                    dwp[widx] = static_cast<float>(acc);
                }
            }
        }
    }
    return out;
}

Tensor maxpool2x2(const Tensor& x, std::vector<std::uint32_t>* argmax)
{
    if (x.rank() != 3) throw ShapeError("maxpool2x2: input must be [C,H,W], got " + shape_str(x.shape()));
    const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
    const std::size_t ho = h / 2, wo = w / 2;
    if (ho == 0 || wo == 0) throw ShapeError("maxpool2x2: input too small " + shape_str(x.shape()));
    Tensor y({c, ho, wo});
    if (argmax) argmax->assign(c * ho * wo, 0);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
            for (std::size_t ox = 0; ox < wo; ++ox) {
                std::size_t best = (ch * h + 2 * oy) * w + 2 * ox;
                const std::size_t cand[3] = {best + 1, best + w, best + w + 1};
                for (auto idx : cand) {
                    if (x[idx] > x[best]) best = idx;
                }
                const std::size_t o = (ch * ho + oy) * wo + ox;
                y[o] = x[best];
                if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(best);
            }
        }
    }
    return y;
}

Tensor maxpool2x2_backward(const Shape& x_shape, std::span<const std::uint32_t> argmax, const Tensor& dy)
{
    if (argmax.size() != dy.size()) throw ShapeError("maxpool2x2_backward: argmax/upstream size mismatch");
    Tensor dx(x_shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax[i]] += dy[i];
    return dx;
}

Tensor relu(const Tensor& x)
{
    Tensor y = x;
    for (auto& v : y.data()) v = v > 0.0f ? v : 0.0f;
    return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy)
{
    require_same_shape(x, dy, "relu_backward");
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(x[i] > 0.0f)) dx[i] = 0.0f;
    }
    return dx;
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b)
{
    if (w.rank() != 2) throw ShapeError("dense: weights must be [N_out,N_in], got " + shape_str(w.shape()));
    const std::size_t nout = w.dim(0), nin = w.dim(1);
    if (x.size() != nin) {
        throw ShapeError("dense: input has " + std::to_string(x.size()) + " elements, weights expect " + std::to_string(nin));
    }
    require_shape(b, {nout}, "dense bias");
    Tensor y({nout});
    for (std::size_t o = 0; o < nout; ++o) {
        const float* wr = w.ptr() + o * nin;
        double acc = b[o];
        for (std::size_t i = 0; i < nin; ++i) acc += static_cast<double>(wr[i]) * x[i];
        y[o] = static_cast<float>(acc);
    }
    return y;
}

DenseGrads dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy)
{
    const std::size_t nout = w.dim(0), nin = w.dim(1);
    if (x.size() != nin) throw ShapeError("dense_backward: input size mismatch");
    require_shape(dy, {nout}, "dense_backward upstream");
    DenseGrads g{Tensor(x.shape()), Tensor(w.shape()), dy};
    std::vector<double> dx(nin, 0.0);
    for (std::size_t o = 0; o < nout; ++o) {
        const float* wr = w.ptr() + o * nin;
        float* dwr = g.dw.ptr() + o * nin;
        const float d = dy[o];
        for (std::size_t i = 0; i < nin; ++i) {
            dwr[i] = d * x[i];
            dx[i] += static_cast<double>(wr[i]) * d;
        }
    }
    for (std::size_t i = 0; i < nin; ++i) g.dx[i] = static_cast<float>(dx[i]);
    return g;
}

Tensor dropout(const Tensor& x, float rate, Mode mode, Rng& rng, Tensor* mask)
{
    if (!(rate >= 0.0f && rate < 1.0f)) throw std::invalid_argument("dropout: rate must be in [0,1)");
    if (mode == Mode::Eval || rate == 0.0f) {
        if (mask) *mask = Tensor(x.shape(), 1.0f);
        return x;
    }
    const float keep_scale = 1.0f / (1.0f - rate);
    Tensor m(x.shape());
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = rng.uniform() < rate ? 0.0f : keep_scale;
        y[i] = x[i] * m[i];
    }
    if (mask) *mask = std::move(m);
    return y;
}

Tensor dropout_backward(const Tensor& mask, const Tensor& dy)
{
    require_same_shape(mask, dy, "dropout_backward");
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
    return dx;
}

Tensor conv_transpose2x2(const Tensor& x, const Tensor& w, const Tensor& b)
{
    if (x.rank() != 3) throw ShapeError("conv_transpose2x2: input must be [C,H,W]");
    if (w.rank() != 4 || w.dim(0) != x.dim(0) || w.dim(2) != 2 || w.dim(3) != 2) {
        throw ShapeError("conv_transpose2x2: weights must be [C_in,C_out,2,2], got " + shape_str(w.shape()));
    }
    const std::size_t cin = x.dim(0), h = x.dim(1), wd = x.dim(2), cout = w.dim(1);
    require_shape(b, {cout}, "conv_transpose2x2 bias");
    const std::size_t ho = 2 * h, wo = 2 * wd;
    Tensor y({cout, ho, wo});
    for (std::size_t oc = 0; oc < cout; ++oc) {
        float* yc = y.ptr() + oc * ho * wo;
        std::fill(yc, yc + ho * wo, b[oc]);
        for (std::size_t ic = 0; ic < cin; ++ic) {
            const float* xc = x.ptr() + ic * h * wd;
            for (std::size_t ky = 0; ky < 2; ++ky) {
                for (std::size_t kx = 0; kx < 2; ++kx) {
                    const float wv = w[((ic * cout + oc) * 2 + ky) * 2 + kx];
                    for (std::size_t iy = 0; iy < h; ++iy) {
                        float* yr = yc + (2 * iy + ky) * wo + kx;
                        const float* xr = xc + iy * wd;
                        for (std::size_t ix = 0; ix < wd; ++ix) yr[2 * ix] += wv * xr[ix];
                    }
                }
            }
        }
    }
    return y;
}

ConvTransposeGrads conv_transpose2x2_backward(const Tensor& x, const Tensor& w, const Tensor& dy)
{
    const std::size_t cin = x.dim(0), h = x.dim(1), wd = x.dim(2), cout = w.dim(1);
    const std::size_t ho = 2 * h, wo = 2 * wd;
    require_shape(dy, {cout, ho, wo}, "conv_transpose2x2_backward upstream");
    ConvTransposeGrads g{Tensor(x.shape()), Tensor(w.shape()), Tensor({cout})};
    for (std::size_t oc = 0; oc < cout; ++oc) {
        const float* dyc = dy.ptr() + oc * ho * wo;
        double db = 0.0;
        for (std::size_t i = 0; i < ho * wo; ++i) db += dyc[i];
        g.db[oc] = static_cast<float>(db);
    }
    for (std::size_t ic = 0; ic < cin; ++ic) {
        const float* xc = x.ptr() + ic * h * wd;
        float* dxc = g.dx.ptr() + ic * h * wd;
        for (std::size_t oc = 0; oc < cout; ++oc) {
            const float* dyc = dy.ptr() + oc * ho * wo;
            for (std::size_t ky = 0; ky < 2; ++ky) {
                for (std::size_t kx = 0; kx < 2; ++kx) {
                    const std::size_t widx = ((ic * cout + oc) * 2 + ky) * 2 + kx;
                    const float wv = w[widx];
                    double acc = 0.0;
                    for (std::size_t iy = 0; iy < h; ++iy) {
                        const float* dyr = dyc + (2 * iy + ky) * wo + kx;
                        const float* xr = xc + iy * wd;
                        float* dxr = dxc + iy * wd;
                        for (std::size_t ix = 0; ix < wd; ++ix) {
                            acc += static_cast<double>(xr[ix]) * dyr[2 * ix];
                            dxr[ix] += wv * dyr[2 * ix];
                        }
                    }
                    g.dw[widx] = static_cast<float>(acc);
                }
            }
        }
    }
    return g;
}

Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    if (a.rank() != 3 || b.rank() != 3 || a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2)) {
        throw ShapeError("concat_channels: spatial mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    Tensor y({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.data().begin(), a.data().end(), y.data().begin());
    std::copy(b.data().begin(), b.data().end(), y.data().begin() + static_cast<long>(a.size()));
    return y;
}

std::pair<Tensor, Tensor> split_channels(const Tensor& dy, std::size_t channels_a)
{
    if (dy.rank() != 3 || channels_a == 0 || channels_a >= dy.dim(0)) throw ShapeError("split_channels: bad split");
    const std::size_t plane = dy.dim(1) * dy.dim(2);
    Tensor a({channels_a, dy.dim(1), dy.dim(2)});
    Tensor b({dy.dim(0) - channels_a, dy.dim(1), dy.dim(2)});
    const auto split = static_cast<long>(channels_a * plane);
    std::copy(dy.data().begin(), dy.data().begin() + split, a.data().begin());
    std::copy(dy.data().begin() + split, dy.data().end(), b.data().begin());
    return {std::move(a), std::move(b)};
}

float sigmoid(float z)
{
    if (z >= 0.0f) return 1.0f / (1.0f + std::exp(-z));
    const float e = std::exp(z);
    return e / (1.0f + e);
}

Tensor softmax(const Tensor& logits)
{
    Tensor p = logits;
    float mx = logits[0];
    for (float v : logits.data()) mx = std::max(mx, v);
    double sum = 0.0;
    for (auto& v : p.data()) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : p.data()) v = static_cast<float>(v / sum);
    return p;
}

Tensor softmax_backward(const Tensor& p, const Tensor& dp)
{
    require_same_shape(p, dp, "softmax_backward");
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += static_cast<double>(p[i]) * dp[i];
    Tensor dz(p.shape());
    for (std::size_t i = 0; i < p.size(); ++i) dz[i] = static_cast<float>(p[i] * (dp[i] - dot));
    return dz;
}

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng)
{
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : t.data()) v = static_cast<float>(rng.uniform(-limit, limit));
}

}  // namespace cq::nk
