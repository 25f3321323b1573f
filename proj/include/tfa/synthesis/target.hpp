// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfa {

using ScalarField = std::function<double(std::span<const double>)>;

struct HolderTarget {
    std::string name;
    std::size_t dim = 0;
    double beta = 1.0;
    double holder_constant = 1.0;
    double sup_bound = 1.0;
    double domain_lo = 0.0, domain_hi = 1.0;  // box used for the bounds above
    nlohmann::json params;
    ScalarField eval;

    double operator()(std::span<const double> x) const { return eval(x); }
};

// Registry: constant, linear, product_of_sines, gaussian_bump, radial, polynomial.
// params may carry "domain": [lo, hi] plus overrides "holder_constant",
// "sup_bound" and "beta".
HolderTarget make_target(const std::string& name, std::size_t dim, const nlohmann::json& params = {});
// {"name": ..., "params": {...}}
HolderTarget target_from_json(const nlohmann::json& spec, std::size_t dim);
const std::vector<std::string>& target_names();

// Throws a bound error if |f| exceeds sup_bound on one of `samples` points of
// the domain box.
void spot_check_target(const HolderTarget& target, std::size_t samples, std::uint64_t seed);

}  // namespace tfa
