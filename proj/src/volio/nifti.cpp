#include "cq/volio/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "cq/volio/error.hpp"

namespace cq::volio {

namespace {

// Standard NIfTI-1 field offsets.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffMagic = 344;

class Reader {
public:
    Reader(std::span<const std::byte> bytes, bool swap) : bytes_(bytes), swap_(swap) {}

    template <typename T>
    T read(std::size_t offset) const
    {
        std::array<std::byte, sizeof(T)> raw;
        std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
        // Canonical order is little-endian; swap when the file and host disagree.
        const bool file_big = swap_;
        const bool host_big = std::endian::native == std::endian::big;
        if (file_big != host_big) std::reverse(raw.begin(), raw.end());
        T value;
        std::memcpy(&value, raw.data(), sizeof(T));
        return value;
    }

private:
    std::span<const std::byte> bytes_;
    bool swap_;
};

}  // namespace

NiftiHeader parse_nifti_header(std::span<const std::byte> bytes)
{
    if (bytes.size() < kNiftiHeaderSize) {
        throw Error(Errc::Truncated, "header needs 348 bytes, got " + std::to_string(bytes.size()));
    }
    NiftiHeader h;
    const Reader le(bytes, false);
    const Reader be(bytes, true);
    const Reader* r = &le;
    if (le.read<std::int32_t>(kOffSizeofHdr) != 348) {
        if (be.read<std::int32_t>(kOffSizeofHdr) != 348) {
            throw Error(Errc::BadMagic, "sizeof_hdr is not 348 in either byte order");
        }
        r = &be;
        h.big_endian = true;
    }
    std::memcpy(h.magic.data(), bytes.data() + kOffMagic, 4);
    const bool n_plus_1 = h.magic[0] == 'n' && h.magic[1] == '+' && h.magic[2] == '1' && h.magic[3] == '\0';
    const bool ni1 = h.magic[0] == 'n' && h.magic[1] == 'i' && h.magic[2] == '1' && h.magic[3] == '\0';
    if (!n_plus_1 && !ni1) throw Error(Errc::BadMagic, "magic is not \"n+1\" or \"ni1\"");

    for (std::size_t i = 0; i < 8; ++i) h.dim[i] = r->read<std::int16_t>(kOffDim + 2 * i);
    h.datatype = r->read<std::int16_t>(kOffDatatype);
    h.bitpix = r->read<std::int16_t>(kOffBitpix);
    h.vox_offset = r->read<float>(kOffVoxOffset);
    h.scl_slope = r->read<float>(kOffSclSlope);
    h.scl_inter = r->read<float>(kOffSclInter);

    const int rank = h.dim[0];
    if (rank < 3 || rank > 7) throw Error(Errc::BadRank, "dim[0] = " + std::to_string(rank) + ", need a 3D volume");
    for (int i = 1; i <= 3; ++i) {
        if (h.dim[i] < 1) throw Error(Errc::BadRank, "dim[" + std::to_string(i) + "] must be positive");
    }
    // Higher ranks are accepted only when the extra axes are singleton.
    for (int i = 4; i <= rank; ++i) {
        if (h.dim[i] > 1) throw Error(Errc::BadRank, "time series / rank > 3 volumes are not supported");
    }

    const bool int16 = h.datatype == static_cast<std::int16_t>(NiftiDatatype::Int16) && h.bitpix == 16;
    const bool float32 = h.datatype == static_cast<std::int16_t>(NiftiDatatype::Float32) && h.bitpix == 32;
    if (!int16 && !float32) {
        throw Error(Errc::UnsupportedDatatype,
                    "datatype " + std::to_string(h.datatype) + " / bitpix " + std::to_string(h.bitpix));
    }
    if (!(h.vox_offset >= 0.0f) || !std::isfinite(h.vox_offset)) {
        throw Error(Errc::Truncated, "vox_offset is not a valid byte offset");
    }
    return h;
}

NiftiVolume parse_nifti(std::span<const std::byte> bytes, std::optional<std::span<const std::byte>> image_bytes)
{
    NiftiVolume out;
    out.header = parse_nifti_header(bytes);
    const NiftiHeader& h = out.header;

    std::span<const std::byte> data = bytes;
    if (!h.single_file()) {
        if (!image_bytes) throw Error(Errc::Truncated, "detached ni1 header supplied without its image data");
        data = *image_bytes;
    }

    Volume3D& v = out.volume;
    v.nx = static_cast<std::size_t>(h.dim[1]);
    v.ny = static_cast<std::size_t>(h.dim[2]);
    v.nz = static_cast<std::size_t>(h.dim[3]);
    const std::size_t count = v.nx * v.ny * v.nz;
    const std::size_t width = static_cast<std::size_t>(h.bitpix) / 8;
    const auto offset = static_cast<std::size_t>(h.vox_offset);
    if (data.size() < offset || data.size() - offset < count * width) {
        throw Error(Errc::Truncated, "need " + std::to_string(offset + count * width) + " bytes, have " +
                                         std::to_string(data.size()));
    }

    const Reader r(data, h.big_endian);
    const bool scale = h.scl_slope != 0.0f;
    v.voxels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t at = offset + i * width;
        double raw = width == 2 ? static_cast<double>(r.read<std::int16_t>(at)) : static_cast<double>(r.read<float>(at));
        if (scale) raw = static_cast<double>(h.scl_slope) * raw + static_cast<double>(h.scl_inter);
        // Non-finite samples (NaN padding in some float exports) become 0.
        v.voxels[i] = std::isfinite(raw) ? static_cast<float>(raw) : 0.0f;
    }
    return out;
}

}  // namespace cq::volio
