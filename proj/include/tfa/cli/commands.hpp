// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfa {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_resource = 2, exit_check = 3 };

struct CommandOptions {
    std::string config_path;          // empty: overrides only
    std::string out_dir;              // empty: $TFAPPROX_OUT, then config "out", then ./tfapprox-out
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    nlohmann::json overrides = nlohmann::json::object();  // merged over the config
    std::ostream* out = nullptr;      // summary; default std::cout
    std::ostream* err = nullptr;      // diagnostics; default std::cerr
};

const std::vector<std::string>& command_names();

// Runs one subcommand, writes its files under the output directory and
// returns the process exit code.
int run_command(const std::string& name, const CommandOptions& options);

}  // namespace tfa
