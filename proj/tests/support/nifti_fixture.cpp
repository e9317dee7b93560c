#include "nifti_fixture.hpp"

#include <cstring>

namespace cq::testing {

namespace {

template <typename T>
void put(std::vector<std::byte>& buf, std::size_t offset, T value, bool big_endian)
{
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    // Test hosts are little-endian (x86/arm64); reverse for big-endian files.
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const std::size_t src = big_endian ? sizeof(T) - 1 - i : i;
        buf[offset + i] = static_cast<std::byte>(raw[src]);
    }
}

void put_voxels(std::vector<std::byte>& buf, std::size_t at, const NiftiFixture& f, std::span<const double> voxels)
{
    const std::size_t width = static_cast<std::size_t>(f.bitpix) / 8;
    buf.resize(at + voxels.size() * width);
    for (std::size_t i = 0; i < voxels.size(); ++i) {
        if (width == 2) put(buf, at + 2 * i, static_cast<std::int16_t>(voxels[i]), f.big_endian);
        else put(buf, at + 4 * i, static_cast<float>(voxels[i]), f.big_endian);
    }
}

}  // namespace

std::vector<std::byte> make_nifti(const NiftiFixture& f, std::span<const double> voxels, bool header_only)
{
    std::vector<std::byte> buf(header_only ? 348 : static_cast<std::size_t>(f.vox_offset), std::byte{0});
    put(buf, 0, std::int32_t{348}, f.big_endian);
    for (std::size_t i = 0; i < 8; ++i) put(buf, 40 + 2 * i, f.dim[i], f.big_endian);
    put(buf, 70, f.datatype, f.big_endian);
    put(buf, 72, f.bitpix, f.big_endian);
    put(buf, 108, f.vox_offset, f.big_endian);
    put(buf, 112, f.scl_slope, f.big_endian);
    put(buf, 116, f.scl_inter, f.big_endian);
    for (std::size_t i = 0; i < 4; ++i) buf[344 + i] = static_cast<std::byte>(f.magic[i]);
    if (!header_only) put_voxels(buf, buf.size(), f, voxels);
    return buf;
}

std::vector<std::byte> make_nifti_image(const NiftiFixture& f, std::span<const double> voxels)
{
    std::vector<std::byte> buf(static_cast<std::size_t>(f.vox_offset), std::byte{0});
    put_voxels(buf, buf.size(), f, voxels);
    return buf;
}

}  // namespace cq::testing
