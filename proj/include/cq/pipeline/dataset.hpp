#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cq/volio/image.hpp"

namespace cq::pipeline {

/// A slice file under a tree laid out as <root>/<plane>/<label>/*.pgm.
struct SliceRecord {
    std::filesystem::path path;
    std::string plane;
    int label = 0;
};

/// Every slice of the listed planes, in sorted path order. Labels are the
/// directory names 0 and 1.
std::vector<SliceRecord> scan_slices(const std::filesystem::path& root, const std::vector<std::string>& planes);

/// "3plane" expands to all three planes.
std::vector<std::string> expand_planes(const std::string& plane);

struct SplitRecords {
    std::vector<SliceRecord> train;
    std::vector<SliceRecord> test;
};

/// Seeded 90:10 split, drawn separately for every (plane, label) group so
/// that the same group always splits the same way. A group of n puts
/// round(n / 10) files in test.
SplitRecords split_stratified(const std::vector<SliceRecord>& records, std::uint64_t seed);

enum class Provenance { Real, Synthetic };

struct ManifestEntry {
    std::string path;
    std::string plane;
    int label = 0;
    std::string split;  // train | test
    Provenance provenance = Provenance::Real;
};

struct DatasetManifest {
    std::string plane;
    bool skull_stripped = false;
    std::uint64_t seed = 0;
    std::vector<ManifestEntry> entries;

    std::size_t count(std::string_view split, int label) const;
    std::size_t synthetic_count() const;
    /// Test entries never carry the synthetic tag.
    bool test_is_pure() const;
};

inline constexpr std::string_view kManifestHeader = "path,plane,label,split,provenance";

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view text);

/// <dir>/manifest.csv plus <dir>/dataset.cfg.
void save_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& dir);

struct LabelledFile {
    volio::Image2D image;
    int label = 0;
};

/// Loads the entries of one split, resizing to `size` when it differs.
std::vector<LabelledFile> load_split(const DatasetManifest& manifest, std::string_view split, std::size_t size);

}  // namespace cq::pipeline
