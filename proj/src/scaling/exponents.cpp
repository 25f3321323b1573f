// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/scaling/exponents.hpp"

#include <cmath>

#include "tfa/error.hpp"

namespace tfa {

ExponentPrediction predict_exponents(double d, double beta) {
    if (!(d > 0.0) || !std::isfinite(d))
        fail(ErrorKind::domain, "intrinsic dimension must be positive");
    if (!(beta > 0.0 && beta <= 1.0))
        fail(ErrorKind::domain, "beta must lie in (0, 1]");
    ExponentPrediction p;
    p.d = d;
    p.beta = beta;
    p.alpha_D = 2.0 * beta / (2.0 * beta + d);
    p.alpha_N = 2.0 * beta / d;
    return p;
}

ExponentKind exponent_kind_from_name(const std::string& name) {
    if (name == "alpha_N" || name == "N")
        return ExponentKind::alpha_N;
    if (name == "alpha_D" || name == "D")
        return ExponentKind::alpha_D;
    fail(ErrorKind::config, "unknown exponent '" + name + "' (alpha_N, alpha_D)");
}

double convert_exponents(ExponentKind known, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
        fail(ErrorKind::domain, "exponent must be positive");
    if (known == ExponentKind::alpha_N)
        return v / (v + 1.0);
    if (v >= 1.0)
        fail(ErrorKind::domain, "alpha_D must be below 1");
    return v / (1.0 - v);
}

}  // namespace tfa
