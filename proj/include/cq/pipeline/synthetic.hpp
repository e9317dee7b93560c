#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cq/nk/rng.hpp"
#include "cq/volio/image.hpp"
#include "cq/volio/nifti.hpp"

namespace cq::pipeline {

/// Gaussian blob on a faint noisy background. Class 0 blobs are small
/// (sigma 7-10% of the side), class 1 blobs large (14-18%).
volio::Image2D blob_image(std::size_t size, int label, nk::Rng& rng);

struct LabelledImage {
    volio::Image2D image;
    int label = 0;
};

/// Alternating labels, `count` images.
std::vector<LabelledImage> blob_corpus(std::size_t size, std::size_t count, std::uint64_t seed);

/// Head-like slice: a textured elliptical "brain" inside a bright
/// elliptical ring ("skull") with a dark gap between them. The mask marks
/// the brain interior.
struct AnnulusSample {
    volio::Image2D image;
    volio::Image2D mask;
};

AnnulusSample annulus_image(std::size_t size, nk::Rng& rng);
std::vector<AnnulusSample> annulus_corpus(std::size_t size, std::size_t count, std::uint64_t seed);

/// Two unit-variance Gaussian bumps at jittered positions in opposite
/// quadrants of a small image; intensities in [0,1].
volio::Image2D two_blob_image(std::size_t size, nk::Rng& rng);
std::vector<volio::Image2D> two_blob_corpus(std::size_t size, std::size_t count, std::uint64_t seed);

/// Ellipsoidal head phantom with a skull shell; `label` 1 enlarges the
/// central dark "ventricles". Values are int16-like scanner units.
volio::Volume3D head_phantom(std::size_t nx, std::size_t ny, std::size_t nz, int label, nk::Rng& rng);

/// Little-endian single-file NIfTI-1, int16 voxels, vox_offset 352.
std::vector<std::byte> encode_nifti_int16(const volio::Volume3D& vol);

}  // namespace cq::pipeline
