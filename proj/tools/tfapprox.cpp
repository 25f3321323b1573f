// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tfa/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tfapprox: explicit transformer approximators, intrinsic dimension and scaling-law tools"};
    app.require_subcommand(1);

    struct Flags {
        std::string config, out;
        unsigned threads = 1;
        std::optional<std::uint64_t> seed;
        std::optional<double> d, beta;
    };
    Flags f;
    const std::map<std::string, std::string> about = {
        {"approx-build", "synthesize a cube approximator, scan its sup error, save the net"},
        {"approx-sweep", "sweep N or eps, fit sup error against token count"},
        {"manifold-demo", "chart-based approximator on a sampled manifold"},
        {"estimate-id", "MLE intrinsic dimension of a CSV point cloud"},
        {"synth-cloud", "sample a synthetic manifold to CSV"},
        {"fit-scaling", "fit a power law to a loss curve"},
        {"predict", "scaling exponents, rate curve and architecture from d and beta"},
        {"covering-bound", "log covering number for an architecture"},
    };
    for (const auto& name : tfa::command_names()) {
        const auto it = about.find(name);
        CLI::App* sub = app.add_subcommand(name, it == about.end() ? std::string() : it->second);
        sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", f.seed, "seed, overrides the config");
        if (name == "predict") {
            sub->add_option("--d", f.d, "intrinsic dimension");
            sub->add_option("--beta", f.beta, "Hoelder exponent");
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tfa::exit_config;
    }

    tfa::CommandOptions opt;
    opt.config_path = f.config;
    opt.out_dir = f.out;
    opt.threads = f.threads;
    opt.seed = f.seed;
    if (f.d)
        opt.overrides["d"] = *f.d;
    if (f.beta)
        opt.overrides["beta"] = *f.beta;
    return tfa::run_command(app.get_subcommands().front()->get_name(), opt);
}
