#include "cq/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cq/cqcnn/train.hpp"
#include "cq/diffusion/ddpm.hpp"
#include "cq/nk/rng.hpp"
#include "cq/pipeline/checkpoint.hpp"
#include "cq/pipeline/error.hpp"
#include "cq/pipeline/files.hpp"
#include "cq/pipeline/models.hpp"
#include "cq/skullnet/segmenter.hpp"
#include "cq/volio/error.hpp"
#include "cq/volio/nifti.hpp"
#include "cq/volio/pgm.hpp"
#include "cq/volio/slicing.hpp"

namespace cq::pipeline {

namespace fs = std::filesystem;

namespace {

struct PlaneDefaults {
    const char* name;
    std::size_t n, k1, k2;
};

constexpr PlaneDefaults kDefaultPlans[] = {{"axial", 40, 10, 18}, {"coronal", 40, 10, 18}, {"sagittal", 40, 13, 15}};

const std::set<std::string> kSliceKeys{
    "input_dir",  "output_dir",  "image_size",  "planes",       "seed",        "axial_n",
    "axial_k1",   "axial_k2",    "coronal_n",   "coronal_k1",   "coronal_k2",  "sagittal_n",
    "sagittal_k1", "sagittal_k2"};
const std::set<std::string> kSegTrainKeys{"data_dir",  "output_dir", "run",        "image_size",       "width_scale",
                                          "epochs",    "batch_size", "lr",         "optimizer",        "seed",
                                          "stop_dice", "stop_iou",   "record_wall_time", "holdout_fraction"};
const std::set<std::string> kSegApplyKeys{"checkpoint", "input_dir", "output_dir", "masks_dir"};
const std::set<std::string> kDiffTrainKeys{"slices_dir", "output_dir", "run",        "plane",          "label",
                                           "seed",       "split_seed", "image_size", "widths",         "time_embed_dim",
                                           "T",          "beta_start", "beta_end",   "epochs",         "batch_size",
                                           "lr",         "record_wall_time"};
const std::set<std::string> kDiffSampleKeys{"checkpoint", "output_dir", "count", "seed", "image_size"};
const std::set<std::string> kBuildKeys{"slices_dir", "output_dir", "plane", "seed", "balance", "diffusion_dir",
                                       "skull_stripped"};
const std::set<std::string> kClassifyKeys{"dataset_dir", "output_dir", "run",       "head",      "qubits",
                                          "epochs",      "batch_size", "lr",        "optimizer", "dropout",
                                          "image_size",  "conv1_out",  "conv2_out", "kernel",    "fc_width",
                                          "seed",        "record_wall_time", "task"};
const std::set<std::string> kEvaluateKeys{"checkpoint", "dataset_dir", "split", "output", "run", "seed"};
const std::set<std::string> kReportKeys{"runs", "runs_dir", "output", "threshold"};

std::set<std::string> train_keys()
{
    std::set<std::string> k = kClassifyKeys;
    k.insert(kSegTrainKeys.begin(), kSegTrainKeys.end());
    k.insert(kDiffTrainKeys.begin(), kDiffTrainKeys.end());
    return k;
}

std::size_t positive(const Config& c, const std::string& key, std::size_t fallback)
{
    const std::int64_t v = c.get_int(key, static_cast<std::int64_t>(fallback));
    if (v <= 0) throw Error(Errc::InvalidConfig, key + " must be positive");
    return static_cast<std::size_t>(v);
}

std::size_t non_negative(const Config& c, const std::string& key, std::size_t fallback)
{
    const std::int64_t v = c.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw Error(Errc::InvalidConfig, key + " must not be negative");
    return static_cast<std::size_t>(v);
}

float learning_rate(const Config& c)
{
    const double lr = c.get_double("lr", 1e-3);
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw Error(Errc::InvalidConfig, "lr must be a non-negative number");
    return static_cast<float>(lr);
}

nk::OptimizerKind optimizer_kind(const Config& c)
{
    try {
        return nk::parse_optimizer_kind(c.get("optimizer", "adam"));
    } catch (const std::exception& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
}

int label_value(const std::string& s)
{
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw Error(Errc::InvalidConfig, "label must be 0 or 1, got " + s);
}

void check_plane(const std::string& plane, bool allow_pooled)
{
    if (allow_pooled && plane == "3plane") return;
    if (plane != "axial" && plane != "coronal" && plane != "sagittal") {
        throw Error(Errc::InvalidConfig, "unknown plane " + plane);
    }
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string default_run(const Config& c)
{
    const fs::path out = c.require("output_dir");
    return c.get("run", out.filename().string());
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}


}  // namespace

std::map<std::string, std::size_t> cmd_slice(const Config& c)
{
    const fs::path in = c.require("input_dir");
    const fs::path out = c.require("output_dir");
    require_dir(in, "input_dir");
    const std::size_t size = positive(c, "image_size", 128);
    const auto planes = c.get_list("planes", {"axial", "coronal", "sagittal"});
    struct Job {
        fs::path path;
        int label;
    };
    std::vector<Job> jobs;
    for (int label : {0, 1}) {
        for (const auto& p : list_files(in / std::to_string(label), ".nii", false)) jobs.push_back({p, label});
    }
    if (jobs.empty()) throw Error(Errc::EmptyInput, "no .nii files under " + in.string() + "/{0,1}");

    std::vector<std::pair<volio::Plane, PlaneDefaults>> plan_params;
    for (const auto& name : planes) {
        check_plane(name, false);
        for (const auto& d : kDefaultPlans) {
            if (name != d.name) continue;
            PlaneDefaults p = d;
            p.n = positive(c, name + "_n", d.n);
            p.k1 = non_negative(c, name + "_k1", d.k1);
            p.k2 = non_negative(c, name + "_k2", d.k2);
            plan_params.emplace_back(volio::parse_plane(name), p);
        }
    }

    std::map<std::string, std::size_t> counts;
    std::string listing = "path,plane,label,source,index\n";
    for (const auto& job : jobs) {
        volio::NiftiVolume vol;
        try {
            vol = volio::parse_nifti(volio::read_file_bytes(job.path));
        } catch (const volio::Error& e) {
            throw volio::Error(e.code(), job.path.string() + ": " + e.what());
        }
        for (const auto& [plane, p] : plan_params) {
            const std::size_t m = volio::plane_extent(vol.volume, plane);
            volio::SlicePlan plan;
            try {
                plan = volio::plan_slices(plane, m, p.n, p.k1, p.k2);
            } catch (const volio::Error& e) {
                throw volio::Error(e.code(), job.path.string() + ": " + e.what());
            }
            for (std::size_t idx : plan.indices()) {
                volio::Image2D img = volio::extract_slice(vol.volume, plane, idx);
                img = volio::resize_bilinear(img, size, size);
                char name[32];
                std::snprintf(name, sizeof name, "_%03zu.pgm", idx);
                const fs::path dst = out / p.name / std::to_string(job.label) / (job.path.stem().string() + name);
                volio::save_pgm(dst, img);
                listing += dst.string() + "," + p.name + "," + std::to_string(job.label) + "," + job.path.string() +
                           "," + std::to_string(idx) + "\n";
                ++counts[p.name];
            }
        }
    }
    write_text(out / "slices.csv", listing);
    return counts;
}


namespace {

std::string seg_header() { return "run,seed,epoch,loss,dice,iou,holdout_dice,holdout_iou,epoch_time_s"; }

}  // namespace

SegmentTrainResult cmd_segment_train(const Config& c)
{
    const fs::path data = c.require("data_dir");
    const fs::path out = c.require("output_dir");
    require_dir(data / "images", "data_dir/images");
    require_dir(data / "masks", "data_dir/masks");
    const std::string run = default_run(c);
    const std::uint64_t seed = c.get_uint("seed", 0);
    skullnet::UNetConfig uc;
    uc.input_size = positive(c, "image_size", 128);
    uc.width_scale = c.get_double("width_scale", 1.0);
    if (!(uc.width_scale > 0.0)) throw Error(Errc::InvalidConfig, "width_scale must be positive");
    try {
        uc.validate();
    } catch (const skullnet::Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    const double holdout_fraction = c.get_double("holdout_fraction", 0.2);
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw Error(Errc::InvalidConfig, "holdout_fraction must be in [0, 1)");
    }
    skullnet::SegTrainOptions opts;
    opts.epochs = non_negative(c, "epochs", 30);
    opts.batch_size = positive(c, "batch_size", 4);
    opts.seed = seed;
    opts.stop_dice = c.get_double("stop_dice", 0.0);
    opts.stop_iou = c.get_double("stop_iou", 0.0);
    const bool record_time = c.get_bool("record_wall_time", true);
    nk::Optimizer opt(optimizer_kind(c), learning_rate(c));

    std::vector<skullnet::MaskPair> pairs;
    for (const auto& img_path : list_files(data / "images", ".pgm", false)) {
        const fs::path mask_path = data / "masks" / img_path.filename();
        require_file(mask_path, "mask for " + img_path.filename().string());
        volio::Image2D img = volio::load_pgm(img_path);
        volio::Image2D mask = volio::load_pgm(mask_path);
        if (img.width != uc.input_size || img.height != uc.input_size) {
            img = volio::resize_bilinear(img, uc.input_size, uc.input_size);
        }
        if (mask.width != uc.input_size || mask.height != uc.input_size) {
            mask = volio::resize_bilinear(mask, uc.input_size, uc.input_size);
        }
        for (auto& v : mask.pixels) v = v >= skullnet::kMaskThreshold ? 1.0f : 0.0f;
        pairs.push_back({std::move(img), std::move(mask)});
    }
    if (pairs.empty()) throw Error(Errc::EmptyInput, "no image/mask pairs under " + data.string());
    nk::Rng split_rng = nk::Rng::derive(seed, "segment/holdout");
    nk::shuffle(pairs, split_rng);
    const auto n_hold = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(pairs.size())));
    const std::vector<skullnet::MaskPair> holdout(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_hold));
    const std::vector<skullnet::MaskPair> train(pairs.begin() + static_cast<std::ptrdiff_t>(n_hold), pairs.end());
    if (train.empty()) throw Error(Errc::EmptyInput, "holdout_fraction leaves no training pairs");

    skullnet::UNet net(uc, seed);
    const auto log = skullnet::train_segmenter(net, train, holdout, opt, opts);
    std::string csv = seg_header() + "\n";
    for (const auto& e : log) {
        csv += run + "," + std::to_string(seed) + "," + std::to_string(e.epoch) + "," + format_number(e.loss) + "," +
               format_number(e.dice) + "," + format_number(e.iou) + "," + format_number(e.holdout_dice) + "," +
               format_number(e.holdout_iou) + "," + format_number(record_time ? e.wall_time_s : 0.0) + "\n";
    }
    write_text(out / "epochs_segment.csv", csv);
    save_checkpoint(out / "model.cqck", save_unet(net));
    write_text(out / "run.cfg", c.to_text());
    SegmentTrainResult r;
    r.epochs_run = log.size();
    if (!log.empty()) {
        r.holdout_dice = log.back().holdout_dice;
        r.holdout_iou = log.back().holdout_iou;
    }
    return r;
}

std::size_t cmd_segment_apply(const Config& c)
{
    const fs::path ckpt = c.require("checkpoint");
    const fs::path in = c.require("input_dir");
    const fs::path out = c.require("output_dir");
    require_file(ckpt, "checkpoint");
    require_dir(in, "input_dir");
    const fs::path masks = c.get("masks_dir", "");
    const skullnet::UNet net = load_unet(load_checkpoint(ckpt));
    const std::size_t s = net.config().input_size;
    const auto files = list_files(in, ".pgm");
    if (files.empty()) throw Error(Errc::EmptyInput, "no .pgm files under " + in.string());
    for (const auto& path : files) {
        const volio::Image2D img = volio::load_pgm(path);
        const bool resized = img.width != s || img.height != s;
        const auto seg = skullnet::segment_apply(net, resized ? volio::resize_bilinear(img, s, s) : img);
        volio::Image2D mask = resized ? volio::resize_bilinear(seg.mask, img.width, img.height) : seg.mask;
        const fs::path rel = fs::relative(path, in);
        volio::save_pgm(out / rel, skullnet::apply_mask(img, mask));
        if (!masks.empty()) {
            for (auto& v : mask.pixels) v = v >= skullnet::kMaskThreshold ? 1.0f : 0.0f;
            volio::save_pgm(masks / rel, mask);
        }
    }
    if (fs::is_regular_file(in / "slices.csv")) fs::copy_file(in / "slices.csv", out / "slices.csv", fs::copy_options::overwrite_existing);
    return files.size();
}


DiffuseTrainResult cmd_diffuse_train(const Config& c)
{
    const fs::path slices = c.require("slices_dir");
    const fs::path out = c.require("output_dir");
    const std::string plane = c.require("plane");
    check_plane(plane, false);
    require_dir(slices, "slices_dir");
    const std::uint64_t seed = c.get_uint("seed", 0);
    const std::uint64_t split_seed = c.get_uint("split_seed", seed);
    const std::size_t T = positive(c, "T", 200);
    const diffusion::NoiseSchedule defaults = diffusion::default_schedule(T);
    const auto beta_start = static_cast<float>(c.get_double("beta_start", defaults.beta.front()));
    const auto beta_end = static_cast<float>(c.get_double("beta_end", defaults.beta.back()));
    diffusion::NoisePredictorConfig pc;
    pc.image_size = positive(c, "image_size", 32);
    pc.widths.clear();
    for (const auto& w : c.get_list("widths", {"16", "32"})) pc.widths.push_back(static_cast<std::size_t>(std::stoul(w)));
    pc.time_embed_dim = positive(c, "time_embed_dim", 16);
    diffusion::DiffusionTrainOptions opts;
    opts.epochs = non_negative(c, "epochs", 500);
    opts.batch_size = positive(c, "batch_size", 8);
    opts.seed = seed;
    const bool record_time = c.get_bool("record_wall_time", true);
    nk::Optimizer opt(optimizer_kind(c), learning_rate(c));

    DiffusionModel model;
    try {
        model.schedule = stored_schedule(T, beta_start, beta_end);
        pc.unet_config().validate();
    } catch (const std::exception& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    model.beta_start = beta_start;
    model.beta_end = beta_end;

    const auto split = split_stratified(scan_slices(slices, {plane}), split_seed);
    if (c.has("label")) {
        model.label = label_value(c.get("label", ""));
    } else {
        std::size_t n[2] = {0, 0};
        for (const auto& r : split.train) ++n[r.label];
        model.label = n[1] <= n[0] ? 1 : 0;
    }
    std::vector<nk::Tensor> images;
    for (const auto& r : split.train) {
        if (r.label != model.label) continue;
        volio::Image2D img = volio::load_pgm(r.path);
        if (img.width != pc.image_size || img.height != pc.image_size) {
            img = volio::resize_bilinear(img, pc.image_size, pc.image_size);
        }
        images.push_back(diffusion::to_model_range(img));
    }
    if (images.empty()) {
        throw Error(Errc::EmptyInput, "no training slices for " + plane + " label " + std::to_string(model.label));
    }
    model.predictor = std::make_unique<diffusion::UNetPredictor>(pc, seed);
    const auto log = diffusion::train(*model.predictor, images, model.schedule, opt, opts);

    const std::string stem = plane + "_" + std::to_string(model.label);
    const std::string run = c.get("run", stem);
    std::string csv = "run,plane,label,seed,epoch,loss,epoch_time_s\n";
    for (const auto& e : log) {
        csv += run + "," + plane + "," + std::to_string(model.label) + "," + std::to_string(seed) + "," +
               std::to_string(e.epoch) + "," + format_number(e.loss) + "," +
               format_number(record_time ? e.wall_time_s : 0.0) + "\n";
    }
    write_text(out / ("diffusion_" + stem + ".csv"), csv);
    DiffuseTrainResult r;
    r.checkpoint = out / (stem + ".cqck");
    save_checkpoint(r.checkpoint, save_diffusion(model));
    r.label = model.label;
    r.images = images.size();
    if (!log.empty()) {
        r.first_loss = log.front().loss;
        r.last_loss = log.back().loss;
    }
    return r;
}

namespace {

std::vector<volio::Image2D> generate(const DiffusionModel& model, std::size_t count, std::size_t size, nk::Rng& rng)
{
    const std::size_t s = model.predictor->config().image_size;
    std::vector<volio::Image2D> out;
    for (std::size_t k = 0; k < count; ++k) {
        volio::Image2D img = diffusion::from_unit_tensor(diffusion::sample(*model.predictor, model.schedule, {1, s, s}, rng));
        if (size != s) img = volio::resize_bilinear(img, size, size);
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace

std::size_t cmd_diffuse_sample(const Config& c)
{
    const fs::path ckpt = c.require("checkpoint");
    const fs::path out = c.require("output_dir");
    require_file(ckpt, "checkpoint");
    const std::size_t count = positive(c, "count", 16);
    const DiffusionModel model = load_diffusion(load_checkpoint(ckpt));
    const std::size_t size = positive(c, "image_size", model.predictor->config().image_size);
    nk::Rng rng = nk::Rng::derive(c.get_uint("seed", 0), "diffusion/sample");
    const auto images = generate(model, count, size, rng);
    for (std::size_t k = 0; k < images.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%05zu.pgm", k);
        volio::save_pgm(out / name, images[k]);
    }
    return images.size();
}


DatasetManifest cmd_build_dataset(const Config& c)
{
    const fs::path slices = c.require("slices_dir");
    const fs::path out = c.require("output_dir");
    const std::string plane = c.require("plane");
    check_plane(plane, true);
    require_dir(slices, "slices_dir");
    const std::uint64_t seed = c.get_uint("seed", 0);
    const bool balance = c.get_bool("balance", true);
    const fs::path diff_dir = c.get("diffusion_dir", "");

    DatasetManifest m;
    m.plane = plane;
    m.skull_stripped = c.get_bool("skull_stripped", false);
    m.seed = seed;

    struct TopUp {
        std::string plane;
        int label;
        std::size_t deficit;
        std::size_t size;
        fs::path model;
    };
    std::vector<TopUp> topups;
    std::vector<SplitRecords> splits;
    for (const auto& p : expand_planes(plane)) {
        const auto records = scan_slices(slices, {p});
        if (records.empty()) throw Error(Errc::EmptyInput, "no slices for plane " + p + " under " + slices.string());
        splits.push_back(split_stratified(records, seed));
        const auto& split = splits.back();
        std::size_t n[2] = {0, 0};
        for (const auto& r : split.train) ++n[r.label];
        if (!balance || n[0] == n[1]) continue;
        const int minority = n[0] < n[1] ? 0 : 1;
        const fs::path model = diff_dir.empty() ? fs::path() : diff_dir / (p + "_" + std::to_string(minority) + ".cqck");
        if (model.empty() || !fs::is_regular_file(model)) {
            throw Error(Errc::MissingDiffusionModel,
                        "balancing " + p + " needs " + (model.empty() ? std::string("diffusion_dir") : model.string()));
        }
        const auto& first = split.train.front();
        const volio::Image2D probe = volio::load_pgm(first.path);
        topups.push_back({p, minority, n[1 - minority] - n[minority], probe.width, model});
    }

    for (const auto& split : splits) {
        for (const auto& r : split.train) m.entries.push_back({r.path.string(), r.plane, r.label, "train", Provenance::Real});
        for (const auto& r : split.test) m.entries.push_back({r.path.string(), r.plane, r.label, "test", Provenance::Real});
    }
    for (const auto& t : topups) {
        const DiffusionModel model = load_diffusion(load_checkpoint(t.model));
        nk::Rng rng = nk::Rng::derive(seed, "dataset/synthetic/" + t.plane + "/" + std::to_string(t.label));
        const auto images = generate(model, t.deficit, t.size, rng);
        for (std::size_t k = 0; k < images.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "syn_%05zu.pgm", k);
            const fs::path dst = out / "synthetic" / t.plane / std::to_string(t.label) / name;
            volio::save_pgm(dst, images[k]);
            m.entries.push_back({dst.string(), t.plane, t.label, "train", Provenance::Synthetic});
        }
    }
    save_manifest(out, m);
    return m;
}


namespace {

std::vector<cqcnn::Sample> to_samples(std::vector<LabelledFile> files)
{
    std::vector<cqcnn::Sample> out;
    out.reserve(files.size());
    for (auto& f : files) out.push_back({std::move(f.image), f.label});
    return out;
}

EpochRow make_row(const std::string& run, const DatasetManifest& m, const cqcnn::CqcnnConfig& cfg, std::uint64_t seed,
                  std::size_t epoch, const std::string& split, const cqcnn::Evaluation& ev, double time_s)
{
    EpochRow r;
    r.run = run;
    r.plane = m.plane;
    r.skull_stripped = m.skull_stripped;
    r.qubits = cfg.head == cqcnn::Head::Quantum ? static_cast<std::size_t>(cfg.n_qubits) : 0;
    r.seed = seed;
    r.epoch = epoch;
    r.split = split;
    r.loss = ev.loss;
    r.accuracy = ev.metrics.accuracy;
    r.precision = ev.metrics.precision;
    r.recall = ev.metrics.recall;
    r.f1 = ev.metrics.f1;
    r.specificity = ev.metrics.specificity;
    r.epoch_time_s = time_s;
    return r;
}

cqcnn::CqcnnConfig classifier_config(const Config& c)
{
    cqcnn::CqcnnConfig cfg;
    try {
        cfg.head = cqcnn::parse_head(c.get("head", "quantum"));
    } catch (const std::exception& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    cfg.n_qubits = static_cast<int>(positive(c, "qubits", 2));
    cfg.image_size = positive(c, "image_size", 128);
    cfg.conv1_out = positive(c, "conv1_out", 2);
    cfg.conv2_out = positive(c, "conv2_out", 4);
    cfg.kernel = positive(c, "kernel", 5);
    cfg.fc_width = positive(c, "fc_width", static_cast<std::size_t>(cfg.n_qubits));
    cfg.dropout_rate = static_cast<float>(c.get_double("dropout", 0.5));
    cfg.seed = c.get_uint("seed", 0);
    cfg.lr = learning_rate(c);
    cfg.epochs = non_negative(c, "epochs", 10);
    cfg.batch_size = positive(c, "batch_size", 1);
    cfg.optimizer = optimizer_kind(c);
    try {
        cfg.validate();
    } catch (const cqcnn::Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    return cfg;
}

std::vector<EpochRow> train_classifier(const Config& c)
{
    const fs::path data = c.require("dataset_dir");
    const fs::path out = c.require("output_dir");
    const cqcnn::CqcnnConfig cfg = classifier_config(c);
    const bool record_time = c.get_bool("record_wall_time", true);
    const std::string run = default_run(c);
    const DatasetManifest m = load_manifest(data);
    const auto train = to_samples(load_split(m, "train", cfg.image_size));
    const auto test = to_samples(load_split(m, "test", cfg.image_size));
    if (train.empty()) throw Error(Errc::EmptyInput, "dataset has no training files");

    cqcnn::CqcnnModel model(cfg);
    nk::Optimizer opt(cfg.optimizer, cfg.lr);
    std::vector<EpochRow> rows;
    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
        const auto rep = cqcnn::train_epoch(model, train, opt, cfg.seed, e);
        const double t = record_time ? rep.wall_time_s : 0.0;
        rows.push_back(make_row(run, m, cfg, cfg.seed, e, "train", cqcnn::evaluate(model, train), t));
        if (!test.empty()) rows.push_back(make_row(run, m, cfg, cfg.seed, e, "test", cqcnn::evaluate(model, test), t));
    }
    write_text(out / "epochs.csv", format_rows(rows));
    save_checkpoint(out / "model.cqck", save_cqcnn(model));
    write_text(out / "run.cfg", c.to_text());
    return rows;
}

}  // namespace

std::vector<EpochRow> cmd_train(const Config& c)
{
    const std::string task = c.get("task", "classify");
    if (task == "segment") {
        cmd_segment_train(c);
        return {};
    }
    if (task == "diffuse") {
        cmd_diffuse_train(c);
        return {};
    }
    if (task != "classify") throw Error(Errc::InvalidConfig, "task must be classify, segment or diffuse");
    return train_classifier(c);
}

EpochRow cmd_evaluate(const Config& c)
{
    const fs::path ckpt = c.require("checkpoint");
    const fs::path data = c.require("dataset_dir");
    require_file(ckpt, "checkpoint");
    const std::string split = c.get("split", "test");
    if (split != "train" && split != "test") throw Error(Errc::InvalidConfig, "split must be train or test");
    const DatasetManifest m = load_manifest(data);
    const cqcnn::CqcnnModel model = load_cqcnn(load_checkpoint(ckpt));
    const auto samples = to_samples(load_split(m, split, model.config().image_size));
    if (samples.empty()) throw Error(Errc::EmptyInput, "split " + split + " is empty");
    const auto ev = cqcnn::evaluate(model, samples);
    const EpochRow row = make_row(c.get("run", ckpt.parent_path().filename().string()), m, model.config(),
                                  c.get_uint("seed", 0), 0, split, ev, 0.0);
    if (c.has("output")) write_text(c.get("output", ""), format_rows({row}));
    return row;
}

std::vector<SummaryRow> cmd_report(const Config& c)
{
    const fs::path out = c.require("output");
    std::vector<fs::path> dirs;
    for (const auto& d : c.get_list("runs", {})) dirs.emplace_back(d);
    if (c.has("runs_dir")) {
        const fs::path root = c.get("runs_dir", "");
        require_dir(root, "runs_dir");
        for (const auto& e : fs::directory_iterator(root))
            if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw Error(Errc::NoRuns, "set runs or runs_dir");
    const double threshold = c.get_double("threshold", 0.95);
    auto rows = report_runs(dirs, threshold);
    write_text(out, format_summary(rows));
    return rows;
}


const std::vector<CommandSpec>& command_table()
{
    static const std::vector<CommandSpec> table{
        {"slice", "NIfTI volumes to per-plane PGM slices", kSliceKeys,
         [](const Config& c) {
             std::string s = "sliced:";
             for (const auto& [plane, n] : cmd_slice(c)) s += " " + plane + "=" + std::to_string(n);
             return s;
         }},
        {"segment-train", "train the skull-stripping U-Net", kSegTrainKeys,
         [](const Config& c) {
             const auto r = cmd_segment_train(c);
             return "epochs " + std::to_string(r.epochs_run) + ", holdout dice " + fmt("%.4f", r.holdout_dice) +
                    ", iou " + fmt("%.4f", r.holdout_iou);
         }},
        {"segment-apply", "skull-strip a PGM tree", kSegApplyKeys,
         [](const Config& c) { return "stripped " + std::to_string(cmd_segment_apply(c)) + " images"; }},
        {"diffuse-train", "train a per-plane minority-class diffusion model", kDiffTrainKeys,
         [](const Config& c) {
             const auto r = cmd_diffuse_train(c);
             return "label " + std::to_string(r.label) + " on " + std::to_string(r.images) + " images, loss " +
                    fmt("%.4f", r.first_loss) + " -> " + fmt("%.4f", r.last_loss) + ", wrote " + r.checkpoint.string();
         }},
        {"diffuse-sample", "draw images from a diffusion checkpoint", kDiffSampleKeys,
         [](const Config& c) { return "wrote " + std::to_string(cmd_diffuse_sample(c)) + " samples"; }},
        {"build-dataset", "90:10 split with diffusion balancing", kBuildKeys,
         [](const Config& c) {
             const auto m = cmd_build_dataset(c);
             return "train " + std::to_string(m.count("train", 0)) + "/" + std::to_string(m.count("train", 1)) +
                    ", test " + std::to_string(m.count("test", 0)) + "/" + std::to_string(m.count("test", 1)) +
                    ", synthetic " + std::to_string(m.synthetic_count());
         }},
        {"train", "train the CQ-CNN classifier (task=segment|diffuse forwards)", train_keys(),
         [](const Config& c) {
             const auto rows = cmd_train(c);
             if (rows.empty()) return std::string("done");
             const auto& last = rows.back();
             return "epoch " + std::to_string(last.epoch) + " " + last.split + " accuracy " +
                    fmt("%.4f", last.accuracy) + ", f1 " + fmt("%.4f", last.f1);
         }},
        {"evaluate", "metrics of a classifier checkpoint on a dataset split", kEvaluateKeys,
         [](const Config& c) {
             const auto r = cmd_evaluate(c);
             return r.split + ": accuracy " + fmt("%.4f", r.accuracy) + ", precision " + fmt("%.4f", r.precision) +
                    ", recall " + fmt("%.4f", r.recall) + ", f1 " + fmt("%.4f", r.f1) + ", specificity " +
                    fmt("%.4f", r.specificity);
         }},
        {"report", "mean/std summary over runs", kReportKeys,
         [](const Config& c) { return std::to_string(cmd_report(c).size()) + " configurations summarized"; }},
    };
    return table;
}

const CommandSpec* find_command(const std::string& name)
{
    for (const auto& spec : command_table())
        if (spec.name == name) return &spec;
    return nullptr;
}

}  // namespace cq::pipeline
