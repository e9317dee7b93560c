#include "cq/pipeline/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cq/nk/rng.hpp"
#include "cq/pipeline/config.hpp"
#include "cq/pipeline/csv.hpp"
#include "cq/pipeline/error.hpp"
#include "cq/pipeline/files.hpp"
#include "cq/volio/pgm.hpp"
#include "cq/volio/slicing.hpp"

namespace cq::pipeline {

namespace fs = std::filesystem;

std::vector<std::string> expand_planes(const std::string& plane)
{
    if (plane == "3plane") return {"axial", "coronal", "sagittal"};
    volio::parse_plane(plane);
    return {plane};
}

std::vector<SliceRecord> scan_slices(const fs::path& root, const std::vector<std::string>& planes)
{
    std::vector<SliceRecord> out;
    for (const auto& plane : planes) {
        for (int label : {0, 1}) {
            for (auto& p : list_files(root / plane / std::to_string(label), ".pgm", false)) {
                out.push_back({std::move(p), plane, label});
            }
        }
    }
    return out;
}

SplitRecords split_stratified(const std::vector<SliceRecord>& records, std::uint64_t seed)
{
    std::map<std::pair<std::string, int>, std::vector<SliceRecord>> groups;
    for (const auto& r : records) groups[{r.plane, r.label}].push_back(r);
    SplitRecords out;
    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        nk::Rng rng = nk::Rng::derive(seed, "dataset/split/" + key.first + "/" + std::to_string(key.second));
        nk::shuffle(group, rng);
        const std::size_t n_test = (group.size() + 5) / 10;
        for (std::size_t i = 0; i < group.size(); ++i) (i < n_test ? out.test : out.train).push_back(group[i]);
    }
    auto by_path = [](const auto& a, const auto& b) { return a.path < b.path; };
    std::sort(out.train.begin(), out.train.end(), by_path);
    std::sort(out.test.begin(), out.test.end(), by_path);
    return out;
}

std::size_t DatasetManifest::count(std::string_view split, int label) const
{
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const ManifestEntry& e) {
        return e.split == split && e.label == label;
    }));
}

std::size_t DatasetManifest::synthetic_count() const
{
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const ManifestEntry& e) {
        return e.provenance == Provenance::Synthetic;
    }));
}

bool DatasetManifest::test_is_pure() const
{
    return std::none_of(entries.begin(), entries.end(), [](const ManifestEntry& e) {
        return e.split == "test" && e.provenance == Provenance::Synthetic;
    });
}

std::string format_manifest(const DatasetManifest& m)
{
    std::string out(kManifestHeader);
    out += '\n';
    for (const auto& e : m.entries) {
        out += e.path + "," + e.plane + "," + std::to_string(e.label) + "," + e.split + "," +
               (e.provenance == Provenance::Real ? "real" : "synthetic") + "\n";
    }
    return out;
}

DatasetManifest parse_manifest(std::string_view text)
{
    DatasetManifest m;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        if (header) {
            if (line != kManifestHeader) throw Error(Errc::InvalidConfig, "unexpected manifest header");
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw Error(Errc::InvalidConfig, "manifest row has " + std::to_string(f.size()) + " fields");
        ManifestEntry e;
        e.path = f[0];
        e.plane = f[1];
        if (f[2] != "0" && f[2] != "1") throw Error(Errc::InvalidConfig, "manifest label must be 0 or 1");
        e.label = f[2] == "1";
        e.split = f[3];
        if (e.split != "train" && e.split != "test") throw Error(Errc::InvalidConfig, "bad split " + e.split);
        if (f[4] == "real") {
            e.provenance = Provenance::Real;
        } else if (f[4] == "synthetic") {
            e.provenance = Provenance::Synthetic;
        } else {
            throw Error(Errc::InvalidConfig, "bad provenance " + f[4]);
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

namespace {

const std::set<std::string> kDatasetKeys{"plane", "skull_stripped", "seed"};

}  // namespace

void save_manifest(const fs::path& dir, const DatasetManifest& m)
{
    write_text(dir / "manifest.csv", format_manifest(m));
    Config c;
    c.set("plane", m.plane, kDatasetKeys);
    c.set("skull_stripped", m.skull_stripped ? "true" : "false", kDatasetKeys);
    c.set("seed", std::to_string(m.seed), kDatasetKeys);
    write_text(dir / "dataset.cfg", c.to_text());
}

DatasetManifest load_manifest(const fs::path& dir)
{
    require_file(dir / "manifest.csv", "dataset manifest");
    DatasetManifest m = parse_manifest(read_text(dir / "manifest.csv"));
    const Config c = Config::load(dir / "dataset.cfg", kDatasetKeys);
    m.plane = c.get("plane", "");
    m.skull_stripped = c.get_bool("skull_stripped", false);
    m.seed = c.get_uint("seed", 0);
    return m;
}

std::vector<LabelledFile> load_split(const DatasetManifest& manifest, std::string_view split, std::size_t size)
{
    std::vector<LabelledFile> out;
    for (const auto& e : manifest.entries) {
        if (e.split != split) continue;
        volio::Image2D img = volio::load_pgm(e.path);
        if (img.width != size || img.height != size) img = volio::resize_bilinear(img, size, size);
        out.push_back({std::move(img), e.label});
    }
    return out;
}

}  // namespace cq::pipeline
