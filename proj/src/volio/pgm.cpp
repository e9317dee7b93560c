#include "cq/volio/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "cq/volio/error.hpp"

namespace cq::volio {

namespace {

std::uint8_t to_byte(float p)
{
    const double v = std::clamp(static_cast<double>(p), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

bool is_space(std::byte b)
{
    const auto c = static_cast<char>(b);
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderScanner {
public:
    explicit HeaderScanner(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::size_t next_uint()
    {
        skip_space_and_comments();
        std::size_t value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size()) {
            const auto c = static_cast<char>(bytes_[pos_]);
            if (c < '0' || c > '9') break;
            value = value * 10 + static_cast<std::size_t>(c - '0');
            if (++digits > 9) throw Error(Errc::BadFormat, "header number too large");
            ++pos_;
        }
        if (digits == 0) throw Error(Errc::BadFormat, "expected a number in PGM header");
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start()
    {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) throw Error(Errc::BadFormat, "missing raster separator");
        return pos_ + 1;
    }

    std::size_t pos_ = 2;

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (static_cast<char>(bytes_[pos_]) == '#') {
                while (pos_ < bytes_.size() && static_cast<char>(bytes_[pos_]) != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::byte> bytes_;
};

}  // namespace

std::vector<std::byte> write_pgm(const Image2D& img)
{
    if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height) {
        throw Error(Errc::InvalidRequest, "cannot encode a malformed image");
    }
    const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::byte> out;
    out.reserve(header.size() + img.pixels.size());
    for (char c : header) out.push_back(static_cast<std::byte>(c));
    for (float p : img.pixels) out.push_back(static_cast<std::byte>(to_byte(p)));
    return out;
}

Image2D read_pgm(std::span<const std::byte> bytes)
{
    if (bytes.size() < 2 || static_cast<char>(bytes[0]) != 'P' || static_cast<char>(bytes[1]) != '5') {
        throw Error(Errc::BadFormat, "not a binary P5 PGM");
    }
    HeaderScanner scan(bytes);
    const std::size_t w = scan.next_uint();
    const std::size_t h = scan.next_uint();
    const std::size_t maxval = scan.next_uint();
    if (w == 0 || h == 0) throw Error(Errc::BadFormat, "zero image dimension");
    if (maxval != 255) throw Error(Errc::BadFormat, "maxval must be 255, got " + std::to_string(maxval));
    const std::size_t start = scan.raster_start();
    if (bytes.size() - start < w * h) throw Error(Errc::BadFormat, "raster truncated");

    Image2D img(w, h);
    for (std::size_t i = 0; i < w * h; ++i) {
        img.pixels[i] = static_cast<float>(std::to_integer<unsigned>(bytes[start + i])) / 255.0f;
    }
    return img;
}

Image2D quantize(const Image2D& img)
{
    Image2D q = img;
    for (auto& p : q.pixels) p = static_cast<float>(to_byte(p)) / 255.0f;
    return q;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::byte> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw std::runtime_error("failed reading " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void save_pgm(const std::filesystem::path& path, const Image2D& img)
{
    write_file_bytes(path, write_pgm(img));
}

Image2D load_pgm(const std::filesystem::path& path)
{
    return read_pgm(read_file_bytes(path));
}

}  // namespace cq::volio
