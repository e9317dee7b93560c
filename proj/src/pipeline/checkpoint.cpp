#include "cq/pipeline/checkpoint.hpp"

#include <cstring>
#include <set>

#include "cq/pipeline/error.hpp"
#include "cq/volio/pgm.hpp"

namespace cq::pipeline {

namespace {

void put_u32(std::vector<std::byte>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
}

void put_u16(std::vector<std::byte>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::byte>(v & 0xffu));
    out.push_back(static_cast<std::byte>(v >> 8));
}

class Reader {
public:
    explicit Reader(std::span<const std::byte> b) : bytes_(b) {}

    std::span<const std::byte> take(std::size_t n)
    {
        if (bytes_.size() - pos_ < n) {
            throw Error(Errc::Truncated, "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
        }
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint32_t u32()
    {
        const auto s = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(s[i]);
        return v;
    }
    std::uint16_t u16()
    {
        const auto s = take(2);
        return static_cast<std::uint16_t>(std::to_integer<unsigned>(s[0]) | (std::to_integer<unsigned>(s[1]) << 8));
    }
    std::uint8_t u8() { return std::to_integer<std::uint8_t>(take(1)[0]); }
    bool done() const noexcept { return pos_ == bytes_.size(); }

private:
    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_checkpoint(const TensorMap& tensors)
{
    std::set<std::string> seen;
    std::vector<std::byte> out;
    for (char c : std::string("CQCK")) out.push_back(static_cast<std::byte>(c));
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        if (!seen.insert(name).second) throw Error(Errc::DuplicateName, name);
        if (name.size() > 0xffff) throw Error(Errc::InvalidConfig, "tensor name too long");
        if (t.rank() > 0xff) throw Error(Errc::InvalidConfig, "tensor rank too large: " + name);
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        for (char c : name) out.push_back(static_cast<std::byte>(c));
        out.push_back(static_cast<std::byte>(t.rank()));
        for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
        for (float v : t.data()) {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_u32(out, bits);
        }
    }
    return out;
}

TensorMap decode_checkpoint(std::span<const std::byte> bytes)
{
    Reader r(bytes);
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), "CQCK", 4) != 0) throw Error(Errc::BadMagic, "not a CQCK checkpoint");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) throw Error(Errc::BadVersion, "version " + std::to_string(version));
    const std::uint32_t count = r.u32();
    TensorMap out;
    std::set<std::string> seen;
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint16_t len = r.u16();
        const auto nb = r.take(len);
        std::string name(reinterpret_cast<const char*>(nb.data()), nb.size());
        if (!seen.insert(name).second) throw Error(Errc::DuplicateName, name);
        const std::uint8_t ndim = r.u8();
        nk::Shape shape(ndim);
        std::size_t n = 1;
        for (auto& d : shape) {
            d = r.u32();
            n *= d;
        }
        nk::Tensor t(shape);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t bits = r.u32();
            float v;
            std::memcpy(&v, &bits, 4);
            t[i] = v;
        }
        out.emplace_back(std::move(name), std::move(t));
    }
    if (!r.done()) throw Error(Errc::Truncated, "trailing bytes after last tensor");
    return out;
}

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors)
{
    const auto bytes = encode_checkpoint(tensors);
    volio::write_file_bytes(path, bytes);
}

TensorMap load_checkpoint(const std::filesystem::path& path)
{
    return decode_checkpoint(volio::read_file_bytes(path));
}

const nk::Tensor* find_tensor(const TensorMap& map, const std::string& name)
{
    for (const auto& [n, t] : map)
        if (n == name) return &t;
    return nullptr;
}

double meta_value(const TensorMap& map, const std::string& name)
{
    const nk::Tensor* t = find_tensor(map, name);
    if (!t || t->size() != 1) throw Error(Errc::InvalidConfig, "checkpoint lacks " + name);
    return (*t)[0];
}

void put_meta(TensorMap& map, const std::string& name, double value)
{
    map.emplace_back(name, nk::Tensor({1}, static_cast<float>(value)));
}

TensorMap snapshot(std::span<const nk::ParamRef> params)
{
    TensorMap out;
    for (const auto& p : params) out.emplace_back(p.name, *p.value);
    return out;
}

void restore(std::span<const nk::ParamRef> params, const TensorMap& map)
{
    for (const auto& p : params) {
        const nk::Tensor* t = find_tensor(map, p.name);
        if (!t) throw Error(Errc::InvalidConfig, "checkpoint lacks tensor " + p.name);
        if (t->shape() != p.value->shape()) {
            throw Error(Errc::InvalidConfig, "shape mismatch for " + p.name + ": " + nk::shape_str(t->shape()) +
                                                 " vs " + nk::shape_str(p.value->shape()));
        }
        *p.value = *t;
    }
}

}  // namespace cq::pipeline
