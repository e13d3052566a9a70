// poslab run <experiment> --config <file> [--out <dir>] [--seed <u64>] [--refine <L>]
// Exit codes: 0 pass, 1 fail, 2 invalid configuration or usage.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "poslab/errors.hpp"
#include "poslab/harness/config.hpp"
#include "poslab/harness/experiments.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_invalid = 2;

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace poslab::harness;

    CLI::App app{"Radial model experiments for nonnegativity of L^p subsolutions"};
    app.require_subcommand(1);

    std::string experiment, config_path, out_dir;
    std::uint64_t seed = 0;
    std::size_t refine = 0;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment and write report.json plus CSV tables");
    run_cmd->add_option("experiment", experiment, "Experiment name (see 'list')")->required();
    run_cmd->add_option("--config", config_path, "INI configuration file")->required();
    auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory (overrides POSLAB_OUT_DIR)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Seed for randomized suites");
    auto* refine_opt = run_cmd->add_option("--refine", refine, "Refinement levels L >= 2");

    auto* list_cmd = app.add_subcommand("list", "List experiments and input profiles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_invalid;
    }

    if (list_cmd->parsed()) {
        fmt::print("experiments: {}\ninputs: {}\n", join(experiment_names()), join(input_names()));
        return exit_pass;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path, experiment);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (out_opt->count() > 0) cfg.output.dir = out_dir;
        else if (const char* env = std::getenv("POSLAB_OUT_DIR"); env != nullptr && *env != '\0')
            cfg.output.dir = env;
        if (refine_opt->count() > 0 && refine < 2)
            throw poslab::InvalidArgument("--refine needs at least 2 levels");
        resolve(cfg);
    } catch (const poslab::InvalidArgument& e) {
        fmt::print(stderr, "invalid configuration: {}\n", e.what());
        return exit_invalid;
    }

    try {
        const ExperimentReport rep = refine_opt->count() > 0 ? sweep(cfg, refine) : run(cfg);
        const auto written = write_report(rep, cfg.output.dir, cfg.output.tables);
        for (const auto& stage : rep.stages) {
            fmt::print("{:<24} {}\n", stage.at("name").get<std::string>(),
                       stage.at("pass").get<bool>() ? "pass" : "FAIL");
        }
        fmt::print("verdict: {} ({:.3f} s)\n", rep.pass ? "pass" : "fail", rep.wall_time);
        for (const auto& w : written) fmt::print("wrote {}\n", w);
        return rep.pass ? exit_pass : exit_fail;
    } catch (const poslab::InvalidArgument& e) {
        fmt::print(stderr, "invalid configuration: {}\n", e.what());
        return exit_invalid;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_fail;
    }
}
