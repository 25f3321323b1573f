// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/scaling/covering.hpp"

#include <cmath>

#include "tfa/error.hpp"

namespace tfa {

void validate_arch(const ArchParams& p) {
    const std::pair<const char*, double> ints[] = {{"L_T", p.L_T}, {"L_ff", p.L_ff}, {"w_ff", p.w_ff},
                                                   {"l", p.l},     {"d_embd", p.d_embd}, {"m", p.m}};
    for (auto [name, v] : ints)
        if (!(v >= 1.0) || v != std::floor(v) || !std::isfinite(v))
            fail(ErrorKind::domain, std::string(name) + " must be a positive integer");
    const std::pair<const char*, double> reals[] = {{"kappa", p.kappa}, {"M", p.M}, {"R", p.R}, {"D", p.D}};
    for (auto [name, v] : reals)
        if (!(v > 0.0) || !std::isfinite(v))
            fail(ErrorKind::domain, std::string(name) + " must be positive");
    if (!(p.delta > 0.0))
        fail(ErrorKind::domain, "delta must be positive");
}

ArchParams arch_from_json(const nlohmann::json& j) {
    ArchParams p;
    for (auto& [key, val] : j.items()) {
        double* f = key == "L_T"      ? &p.L_T
                    : key == "L_ff"   ? &p.L_ff
                    : key == "w_ff"   ? &p.w_ff
                    : key == "l"      ? &p.l
                    : key == "d_embd" ? &p.d_embd
                    : key == "m"      ? &p.m
                    : key == "kappa"  ? &p.kappa
                    : key == "M"      ? &p.M
                    : key == "R"      ? &p.R
                    : key == "D"      ? &p.D
                    : key == "delta"  ? &p.delta
                                      : nullptr;
        if (!f)
            fail(ErrorKind::config, "unknown architecture field '" + key + "'");
        if (!val.is_number())
            fail(ErrorKind::config, "architecture field '" + key + "' must be a number");
        *f = val.get<double>();
    }
    return p;
}

nlohmann::json to_json(const ArchParams& p) {
    return {{"L_T", p.L_T}, {"L_ff", p.L_ff},   {"w_ff", p.w_ff}, {"l", p.l}, {"d_embd", p.d_embd}, {"m", p.m},
            {"kappa", p.kappa}, {"M", p.M}, {"R", p.R},       {"D", p.D}, {"delta", p.delta}};
}

double covering_prefactor(const ArchParams& p) {
    return 4.0 * p.d_embd * p.d_embd * p.w_ff * p.w_ff * p.D * (p.m + p.L_ff) * p.L_T;
}

double log_covering_number(const ArchParams& p) {
    validate_arch(p);
    const double L = p.L_T, L2 = L * L;
    const double bracket = (L2 + 1.0) * std::log(2.0) + std::log(p.L_ff) + 3.0 * L * std::log(p.M) +
                           18.0 * L2 * std::log(p.d_embd) + 18.0 * L2 * p.L_ff * std::log(p.w_ff) +
                           6.0 * L2 * p.L_ff * std::log(p.kappa) + L2 * std::log(p.m) + L2 * std::log(p.l) -
                           std::log(p.delta);
    return covering_prefactor(p) * bracket;
}

std::vector<std::pair<double, double>> generalization_rate_curve(double d, double beta, double D,
                                                                 const std::vector<double>& ns) {
    if (!(d > 0.0 && beta > 0.0 && D > 0.0))
        fail(ErrorKind::domain, "d, beta and D must be positive");
    const double a = 2.0 * beta / (2.0 * beta + d);
    std::vector<std::pair<double, double>> out;
    out.reserve(ns.size());
    for (double n : ns) {
        if (!(n > 0.0))
            fail(ErrorKind::domain, "sample sizes must be positive");
        out.emplace_back(n, D * d * d * std::pow(n, -a));
    }
    return out;
}

}  // namespace tfa
