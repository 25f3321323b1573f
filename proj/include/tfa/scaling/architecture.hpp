// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"
#include "tfa/scaling/covering.hpp"

namespace tfa {

enum class ArchMode { approximation, estimation };

struct ArchRequest {
    ArchMode mode = ArchMode::approximation;
    double eps = 0.1;         // approximation
    double n = 10000;         // estimation: sample size
    std::size_t d = 1;
    double beta = 1.0;
    double holder_constant = 1.0;
    double sup_bound = 1.0;
    std::size_t token_cap = 1000000;
};

struct ArchPrediction {
    ArchParams params;
    std::size_t N = 0;
    double grid_driver = 0.0;   // patch count: eps^(-d/b) or n^(d/(2b+d))
    double token_driver = 0.0;  // d eps^(-d/b) or d n^(d/(2b+d))
    bool materialized = false;  // false: layout beyond the token cap, kappa is a bound
    std::size_t model_size = 0; // L_T d_embd^2 (3m + L_ff)
    std::string drivers;
};

// Architecture of the cube construction at the requested accuracy or sample size.
ArchPrediction predicted_architecture(const ArchRequest& request);
nlohmann::json to_json(const ArchPrediction& p);

}  // namespace tfa
