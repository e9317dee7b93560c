#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cq::volio {

/// 3D scalar field. x runs sagittal-to-sagittal (left/right), y coronal,
/// z axial; voxels are stored x-fastest.
struct Volume3D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;
    std::vector<float> voxels;

    float at(std::size_t x, std::size_t y, std::size_t z) const { return voxels[x + nx * (y + ny * z)]; }
    float& at(std::size_t x, std::size_t y, std::size_t z) { return voxels[x + nx * (y + ny * z)]; }
};

enum class NiftiDatatype : std::int16_t { Int16 = 4, Float32 = 16 };

struct NiftiHeader {
    std::int32_t sizeof_hdr = 348;
    std::array<std::int16_t, 8> dim{};
    std::int16_t datatype = 0;
    std::int16_t bitpix = 0;
    float vox_offset = 0.0f;
    float scl_slope = 0.0f;
    float scl_inter = 0.0f;
    std::array<char, 4> magic{};
    bool big_endian = false;

    bool single_file() const noexcept { return magic[1] == '+'; }
};

struct NiftiVolume {
    NiftiHeader header;
    Volume3D volume;
};

inline constexpr std::size_t kNiftiHeaderSize = 348;

/// Decodes the 348-byte header only (byte order detected from sizeof_hdr).
NiftiHeader parse_nifti_header(std::span<const std::byte> bytes);

/// Single-file "n+1" payload: voxels live in the same buffer at vox_offset.
/// A detached "ni1" header needs its image bytes passed as `image_bytes`,
/// read from vox_offset within that buffer.
NiftiVolume parse_nifti(std::span<const std::byte> bytes,
                        std::optional<std::span<const std::byte>> image_bytes = std::nullopt);

}  // namespace cq::volio
