#pragma once

#include <cstddef>
#include <vector>

namespace cq::volio {

/// Grayscale image, row-major, intensities in [0,1].
struct Image2D {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> pixels;

    Image2D() = default;
    Image2D(std::size_t w, std::size_t h, float fill = 0.0f) : width(w), height(h), pixels(w * h, fill) {}

    float& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    float at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

    /// Dimensions match the pixel count and every value is in [0,1].
    bool valid() const;
    friend bool operator==(const Image2D&, const Image2D&) = default;
};

/// Corner-aligned bilinear resampling; output clamped to [0,1].
Image2D resize_bilinear(const Image2D& img, std::size_t width, std::size_t height);

}  // namespace cq::volio
