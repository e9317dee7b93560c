#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "cq/volio/image.hpp"

namespace cq::volio {

/// Binary "P5" with maxval 255; pixel byte = round(p * 255).
std::vector<std::byte> write_pgm(const Image2D& img);
Image2D read_pgm(std::span<const std::byte> bytes);

/// Snaps every pixel to the nearest 1/255 step, i.e. what a PGM round-trip yields.
Image2D quantize(const Image2D& img);

void save_pgm(const std::filesystem::path& path, const Image2D& img);
Image2D load_pgm(const std::filesystem::path& path);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace cq::volio
