// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>

namespace tfa {

struct ExponentPrediction {
    double alpha_D = 0.0;  // data scaling, 2b/(2b+d)
    double alpha_N = 0.0;  // model-size scaling, 2b/d
    double d = 0.0;
    double beta = 1.0;
};

ExponentPrediction predict_exponents(double d, double beta = 1.0);

enum class ExponentKind { alpha_N, alpha_D };
ExponentKind exponent_kind_from_name(const std::string& name);

// alpha_N -> alpha_N/(alpha_N+1); alpha_D -> alpha_D/(1-alpha_D)
double convert_exponents(ExponentKind known, double value);

}  // namespace tfa
