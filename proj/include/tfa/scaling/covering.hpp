// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <utility>
#include <vector>

#include "json.hpp"

namespace tfa {

struct ArchParams {
    double L_T = 1, L_ff = 1, w_ff = 1, l = 1, d_embd = 1, m = 1;  // positive integers
    double kappa = 1, M = 1, R = 1, D = 1, delta = 1;
};

void validate_arch(const ArchParams& p);
ArchParams arch_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ArchParams& p);

// 4 d_embd^2 w_ff^2 D (m + L_ff) L_T
double covering_prefactor(const ArchParams& p);
// natural log of the covering-number bound of the transformer class at radius delta
double log_covering_number(const ArchParams& p);

// D d^2 n^(-2b/(2b+d)); a rate shape, not a calibrated loss
std::vector<std::pair<double, double>> generalization_rate_curve(double d, double beta, double D,
                                                                 const std::vector<double>& n_values);

}  // namespace tfa
