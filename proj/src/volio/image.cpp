#include "cq/volio/image.hpp"

#include <algorithm>
#include <cmath>

#include "cq/volio/error.hpp"

namespace cq::volio {

bool Image2D::valid() const
{
    if (width == 0 || height == 0 || pixels.size() != width * height) return false;
    return std::all_of(pixels.begin(), pixels.end(), [](float p) { return p >= 0.0f && p <= 1.0f; });
}

namespace {
// Source coordinate for output index i when corners of both grids coincide.
double source_coord(std::size_t i, std::size_t n_out, std::size_t n_in)
{
    if (n_out == 1) return 0.0;
    return static_cast<double>(i) * static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1);
}
}  // namespace

Image2D resize_bilinear(const Image2D& img, std::size_t width, std::size_t height)
{
    if (width == 0 || height == 0) throw Error(Errc::InvalidRequest, "resize target must be at least 1x1");
    if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height) {
        throw Error(Errc::InvalidRequest, "resize source image is malformed");
    }
    if (width == img.width && height == img.height) return img;

    Image2D out(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        const double sy = source_coord(y, height, img.height);
        const auto y0 = static_cast<std::size_t>(std::floor(sy));
        const std::size_t y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t x = 0; x < width; ++x) {
            const double sx = source_coord(x, width, img.width);
            const auto x0 = static_cast<std::size_t>(std::floor(sx));
            const std::size_t x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - static_cast<double>(x0);
            const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
            const double bottom = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
            const double v = (1.0 - fy) * top + fy * bottom;
            out.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedDatatype: return "UnsupportedDatatype";
    case Errc::Truncated: return "Truncated";
    case Errc::BadRank: return "BadRank";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::EmptyPlan: return "EmptyPlan";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::BadFormat: return "BadFormat";
    }
    return "Unknown";
}

}  // namespace cq::volio
