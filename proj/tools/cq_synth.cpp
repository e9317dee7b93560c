// cq-synth: synthetic inputs for trying the pipeline without real scans.
//
//   cq-synth phantoms <dir> [--per-class N] [--positives P] [--size S] [--seed K]
//       <dir>/{0,1}/subNN.nii head phantoms (label 1 has enlarged ventricles)
//   cq-synth annulus <dir> [--count N] [--size S] [--seed K]
//       <dir>/images/*.pgm and <dir>/masks/*.pgm skull-stripping pairs

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "cq/nk/rng.hpp"
#include "cq/pipeline/synthetic.hpp"
#include "cq/volio/pgm.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv)
{
    CLI::App app{"Synthetic phantom volumes and skull-stripping pairs"};
    app.require_subcommand(1);

    std::string out;
    std::size_t count = 4, size = 64, positives = 0;
    std::uint64_t seed = 0;

    CLI::App* phantoms = app.add_subcommand("phantoms", "NIfTI head phantoms per class");
    phantoms->add_option("dir", out)->required();
    phantoms->add_option("--per-class", count, "volumes per class");
    phantoms->add_option("--positives", positives, "label-1 volumes (default: per-class)");
    phantoms->add_option("--size", size, "cube side in voxels");
    phantoms->add_option("--seed", seed);

    CLI::App* annulus = app.add_subcommand("annulus", "image/mask pairs for segment-train");
    annulus->add_option("dir", out)->required();
    annulus->add_option("--count", count, "pairs");
    annulus->add_option("--size", size, "image side");
    annulus->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (phantoms->parsed()) {
            cq::nk::Rng rng = cq::nk::Rng::derive(seed, "synth/phantoms");
            if (positives == 0) positives = count;
            for (int label : {0, 1})
                for (std::size_t i = 0; i < (label == 1 ? positives : count); ++i) {
                    char name[32];
                    std::snprintf(name, sizeof name, "sub%02zu.nii", i);
                    const auto vol = cq::pipeline::head_phantom(size, size, size, label, rng);
                    cq::volio::write_file_bytes(fs::path(out) / std::to_string(label) / name,
                                                cq::pipeline::encode_nifti_int16(vol));
                }
            std::printf("wrote %zu volumes under %s\n", count + positives, out.c_str());
        } else {
            const auto pairs = cq::pipeline::annulus_corpus(size, count, seed);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "a%04zu.pgm", i);
                cq::volio::save_pgm(fs::path(out) / "images" / name, pairs[i].image);
                cq::volio::save_pgm(fs::path(out) / "masks" / name, pairs[i].mask);
            }
            std::printf("wrote %zu pairs under %s\n", pairs.size(), out.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
