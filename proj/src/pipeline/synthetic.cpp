#include "cq/pipeline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace cq::pipeline {

namespace {

float clamp01(double v)
{
    return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

}  // namespace

volio::Image2D blob_image(std::size_t size, int label, nk::Rng& rng)
{
    const double s = static_cast<double>(size);
    const double sigma = label == 0 ? rng.uniform(0.07, 0.10) * s : rng.uniform(0.14, 0.18) * s;
    const double cx = rng.uniform(0.3, 0.7) * s, cy = rng.uniform(0.3, 0.7) * s;
    const double peak = rng.uniform(0.7, 1.0);
    volio::Image2D img(size, size);
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
            const double v = peak * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
            img.at(x, y) = clamp01(0.05 + v + 0.03 * rng.normal());
        }
    }
    return img;
}

std::vector<LabelledImage> blob_corpus(std::size_t size, std::size_t count, std::uint64_t seed)
{
    nk::Rng rng = nk::Rng::derive(seed, "synthetic/blobs");
    std::vector<LabelledImage> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(i % 2);
        out.push_back({blob_image(size, label, rng), label});
    }
    return out;
}

AnnulusSample annulus_image(std::size_t size, nk::Rng& rng)
{
    const double s = static_cast<double>(size);
    const double cx = s / 2 + rng.uniform(-0.06, 0.06) * s, cy = s / 2 + rng.uniform(-0.06, 0.06) * s;
    const double ax = rng.uniform(0.26, 0.36) * s, ay = rng.uniform(0.30, 0.40) * s;
    const double gap = rng.uniform(0.05, 0.08), shell = rng.uniform(0.10, 0.16);
    const double brain_level = rng.uniform(0.35, 0.55), skull_level = rng.uniform(0.6, 0.9);
    const double fx = rng.uniform(0.3, 0.6), fy = rng.uniform(0.3, 0.6), ph = rng.uniform(0.0, 6.28);

    AnnulusSample out{volio::Image2D(size, size), volio::Image2D(size, size)};
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double dx = (static_cast<double>(x) - cx) / ax, dy = (static_cast<double>(y) - cy) / ay;
            const double r = std::sqrt(dx * dx + dy * dy);
            double v = 0.02;
            if (r <= 1.0) {
                v = brain_level + 0.12 * std::sin(fx * static_cast<double>(x) + ph) * std::cos(fy * static_cast<double>(y));
                out.mask.at(x, y) = 1.0f;
            } else if (r > 1.0 + gap && r <= 1.0 + gap + shell) {
                v = skull_level;
            }
            out.image.at(x, y) = clamp01(v + 0.03 * rng.normal());
        }
    }
    return out;
}

std::vector<AnnulusSample> annulus_corpus(std::size_t size, std::size_t count, std::uint64_t seed)
{
    nk::Rng rng = nk::Rng::derive(seed, "synthetic/annulus");
    std::vector<AnnulusSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(annulus_image(size, rng));
    return out;
}

volio::Image2D two_blob_image(std::size_t size, nk::Rng& rng)
{
    const double s = static_cast<double>(size);
    const double x1 = 0.25 * s + rng.uniform(-0.5, 0.5), y1 = 0.25 * s + rng.uniform(-0.5, 0.5);
    const double x2 = 0.75 * s + rng.uniform(-0.5, 0.5), y2 = 0.75 * s + rng.uniform(-0.5, 0.5);
    volio::Image2D img(size, size);
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double px = static_cast<double>(x) + 0.5, py = static_cast<double>(y) + 0.5;
            const double d1 = (px - x1) * (px - x1) + (py - y1) * (py - y1);
            const double d2 = (px - x2) * (px - x2) + (py - y2) * (py - y2);
            img.at(x, y) = clamp01(std::exp(-d1 / 2.0) + std::exp(-d2 / 2.0));
        }
    }
    return img;
}

std::vector<volio::Image2D> two_blob_corpus(std::size_t size, std::size_t count, std::uint64_t seed)
{
    nk::Rng rng = nk::Rng::derive(seed, "synthetic/two_blob");
    std::vector<volio::Image2D> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(two_blob_image(size, rng));
    return out;
}

volio::Volume3D head_phantom(std::size_t nx, std::size_t ny, std::size_t nz, int label, nk::Rng& rng)
{
    volio::Volume3D v{nx, ny, nz, std::vector<float>(nx * ny * nz, 0.0f)};
    const double cx = nx / 2.0, cy = ny / 2.0, cz = nz / 2.0;
    const double rx = 0.38 * nx, ry = 0.40 * ny, rz = 0.38 * nz;
    const double vent = label == 0 ? rng.uniform(0.10, 0.14) : rng.uniform(0.22, 0.28);
    const double tissue = rng.uniform(350.0, 450.0);
    for (std::size_t z = 0; z < nz; ++z) {
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t x = 0; x < nx; ++x) {
                const double dx = (x - cx) / rx, dy = (y - cy) / ry, dz = (z - cz) / rz;
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                double val = 0.0;
                if (r <= 0.85) {
                    val = r < vent ? 80.0 : tissue + 40.0 * std::sin(0.2 * x) * std::cos(0.15 * z);
                } else if (r > 0.9 && r <= 1.0) {
                    val = 900.0;
                }
                v.at(x, y, z) = static_cast<float>(std::round(val + 10.0 * rng.normal()));
            }
        }
    }
    return v;
}

std::vector<std::byte> encode_nifti_int16(const volio::Volume3D& vol)
{
    constexpr std::size_t kOffset = 352;
    std::vector<std::byte> out(kOffset + 2 * vol.voxels.size(), std::byte{0});
    auto put = [&out](std::size_t at, const void* src, std::size_t n) { std::memcpy(out.data() + at, src, n); };
    const std::int32_t hdr = 348;
    put(0, &hdr, 4);
    const std::int16_t dim[8] = {3, static_cast<std::int16_t>(vol.nx), static_cast<std::int16_t>(vol.ny),
                                 static_cast<std::int16_t>(vol.nz), 1, 1, 1, 1};
    put(40, dim, sizeof dim);
    const std::int16_t datatype = 4, bitpix = 16;
    put(70, &datatype, 2);
    put(72, &bitpix, 2);
    const float pixdim[8] = {1, 1, 1, 1, 1, 1, 1, 1};
    put(76, pixdim, sizeof pixdim);
    const float offset = static_cast<float>(kOffset);
    put(108, &offset, 4);
    put(344, "n+1\0", 4);
    for (std::size_t i = 0; i < vol.voxels.size(); ++i) {
        const auto v = static_cast<std::int16_t>(std::clamp(vol.voxels[i], -32768.0f, 32767.0f));
        put(kOffset + 2 * i, &v, 2);
    }
    return out;
}

}  // namespace cq::pipeline
