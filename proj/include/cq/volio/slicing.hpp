#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cq/volio/image.hpp"
#include "cq/volio/nifti.hpp"

namespace cq::volio {

/// Axial: xy plane stepping along z. Coronal: yz plane along x.
/// Sagittal: zx plane along y.
enum class Plane { Axial, Coronal, Sagittal };

inline constexpr Plane kAllPlanes[] = {Plane::Axial, Plane::Coronal, Plane::Sagittal};

const char* to_string(Plane plane) noexcept;
Plane parse_plane(const std::string& name);

/// Extraction schedule for one plane: stride i = floor(m/n), then drop k1
/// strided positions at the start and k2 at the end.
struct SlicePlan {
    Plane plane = Plane::Axial;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t i = 0;
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    std::size_t n_slices = 0;

    /// k1*i, (k1+1)*i, ..., (k1+n_slices-1)*i
    std::vector<std::size_t> indices() const;
};

std::size_t compute_interval(std::size_t m, std::size_t n);
SlicePlan plan_slices(Plane plane, std::size_t m, std::size_t n, std::size_t k1, std::size_t k2);

/// Number of cross-sections available in `plane`.
std::size_t plane_extent(const Volume3D& vol, Plane plane);

/// Cross-section at `index`, min-max normalized over the slice (constant
/// slices become all zeros). The first named axis of the plane is the image
/// width: axial (x,y), coronal (y,z), sagittal (z,x).
Image2D extract_slice(const Volume3D& vol, Plane plane, std::size_t index);

}  // namespace cq::volio
