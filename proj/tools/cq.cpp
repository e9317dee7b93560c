// cq: command-line driver for the slicing, skull-stripping, diffusion and
// classifier pipeline.
//
//   cq <command> --config run.cfg [--set key=value ...]
//   cq keys <command>
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "cq/cqcnn/model.hpp"
#include "cq/diffusion/schedule.hpp"
#include "cq/pipeline/commands.hpp"
#include "cq/pipeline/error.hpp"
#include "cq/skullnet/unet.hpp"

namespace {

int run(const cq::pipeline::CommandSpec& spec, const std::string& config_path, const std::vector<std::string>& sets)
{
    using cq::pipeline::Config;
    Config config = config_path.empty() ? Config() : Config::load(config_path, spec.keys);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw cq::pipeline::Error(cq::pipeline::Errc::InvalidConfig, "--set expects key=value, got " + kv);
        }
        config.set(kv.substr(0, eq), kv.substr(eq + 1), spec.keys);
    }
    std::printf("%s: %s\n", spec.name.c_str(), spec.run(config).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid classical-quantum Alzheimer's detection pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    const cq::pipeline::CommandSpec* chosen = nullptr;
    for (const auto& spec : cq::pipeline::command_table()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.summary);
        sub->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", sets, "override one key, key=value");
        sub->callback([&chosen, &spec] { chosen = &spec; });
    }
    std::string keys_of;
    CLI::App* keys = app.add_subcommand("keys", "list the config keys a command accepts");
    keys->add_option("command", keys_of)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (keys->parsed()) {
        const auto* spec = cq::pipeline::find_command(keys_of);
        if (!spec) {
            std::fprintf(stderr, "unknown command %s\n", keys_of.c_str());
            return 1;
        }
        for (const auto& k : spec->keys) std::printf("%s\n", k.c_str());
        return 0;
    }

    try {
        return run(*chosen, config_path, sets);
    } catch (const cq::pipeline::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cq::pipeline::is_validation(e.code()) ? 1 : 2;
    } catch (const cq::cqcnn::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == cq::cqcnn::Errc::InvalidConfig ? 1 : 2;
    } catch (const cq::skullnet::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == cq::skullnet::Errc::InvalidConfig ? 1 : 2;
    } catch (const cq::diffusion::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == cq::diffusion::Errc::BadRange ? 1 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
