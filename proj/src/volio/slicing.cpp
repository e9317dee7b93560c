#include "cq/volio/slicing.hpp"

#include <algorithm>

#include "cq/volio/error.hpp"

namespace cq::volio {

const char* to_string(Plane plane) noexcept
{
    switch (plane) {
    case Plane::Axial: return "axial";
    case Plane::Coronal: return "coronal";
    case Plane::Sagittal: return "sagittal";
    }
    return "?";
}

Plane parse_plane(const std::string& name)
{
    if (name == "axial") return Plane::Axial;
    if (name == "coronal") return Plane::Coronal;
    if (name == "sagittal") return Plane::Sagittal;
    throw Error(Errc::InvalidRequest, "unknown plane '" + name + "'");
}

std::size_t compute_interval(std::size_t m, std::size_t n)
{
    if (n == 0 || n > m) {
        throw Error(Errc::InvalidRequest, "cannot take " + std::to_string(n) + " slices from " + std::to_string(m));
    }
    return m / n;
}

SlicePlan plan_slices(Plane plane, std::size_t m, std::size_t n, std::size_t k1, std::size_t k2)
{
    SlicePlan p;
    p.plane = plane;
    p.m = m;
    p.n = n;
    p.i = compute_interval(m, n);
    p.k1 = k1;
    p.k2 = k2;
    const std::size_t strided = (m + p.i - 1) / p.i;
    if (strided <= k1 + k2) {
        throw Error(Errc::EmptyPlan, "excluding " + std::to_string(k1 + k2) + " of " + std::to_string(strided) +
                                         " strided slices leaves nothing");
    }
    p.n_slices = strided - (k1 + k2);
    return p;
}

std::vector<std::size_t> SlicePlan::indices() const
{
    std::vector<std::size_t> out(n_slices);
    for (std::size_t j = 0; j < n_slices; ++j) out[j] = (k1 + j) * i;
    return out;
}

std::size_t plane_extent(const Volume3D& vol, Plane plane)
{
    switch (plane) {
    case Plane::Axial: return vol.nz;
    case Plane::Coronal: return vol.nx;
    case Plane::Sagittal: return vol.ny;
    }
    return 0;
}

Image2D extract_slice(const Volume3D& vol, Plane plane, std::size_t index)
{
    const std::size_t extent = plane_extent(vol, plane);
    if (index >= extent) {
        throw Error(Errc::IndexOutOfRange, std::string(to_string(plane)) + " index " + std::to_string(index) +
                                               " outside [0," + std::to_string(extent) + ")");
    }
    Image2D img;
    switch (plane) {
    case Plane::Axial:
        img = Image2D(vol.nx, vol.ny);
        for (std::size_t y = 0; y < vol.ny; ++y)
            for (std::size_t x = 0; x < vol.nx; ++x) img.at(x, y) = vol.at(x, y, index);
        break;
    case Plane::Coronal:
        img = Image2D(vol.ny, vol.nz);
        for (std::size_t z = 0; z < vol.nz; ++z)
            for (std::size_t y = 0; y < vol.ny; ++y) img.at(y, z) = vol.at(index, y, z);
        break;
    case Plane::Sagittal:
        img = Image2D(vol.nz, vol.nx);
        for (std::size_t x = 0; x < vol.nx; ++x)
            for (std::size_t z = 0; z < vol.nz; ++z) img.at(z, x) = vol.at(x, index, z);
        break;
    }

    const auto [lo_it, hi_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        std::fill(img.pixels.begin(), img.pixels.end(), 0.0f);
        return img;
    }
    for (auto& p : img.pixels) p = static_cast<float>(std::clamp((p - lo) / (hi - lo), 0.0, 1.0));
    return img;
}

}  // namespace cq::volio
