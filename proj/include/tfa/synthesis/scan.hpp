// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "tfa/runtime/compiled.hpp"
#include "tfa/synthesis/target.hpp"

namespace tfa {

// Each worker thread asks the factory for its own evaluator.
using EvaluatorFactory = std::function<ScalarField()>;

struct ScanOptions {
    std::size_t resolution = 101;      // points per axis, endpoints included
    std::size_t random_points = 1000;  // interior points drawn after the grid
    std::uint64_t seed = 1;
    std::size_t budget = 10000000;
    unsigned threads = 1;
    std::ostream* csv = nullptr;       // x..., f, approx, error
};

struct ScanResult {
    double sup_error = 0.0;
    std::vector<double> argmax;
    std::size_t points = 0;
};

ScanResult sup_error_scan(const EvaluatorFactory& make_eval, const HolderTarget& target, std::size_t d,
                          const ScanOptions& options);
ScanResult sup_error_scan(const ScalarField& eval, const HolderTarget& target, std::size_t d,
                          const ScanOptions& options);

// Evaluators over a compiled net, one workspace per evaluator.
EvaluatorFactory compiled_evaluator(const CompiledNet& net);

// Scan points in order: the uniform grid then the random interior points.
std::vector<std::vector<double>> scan_points(std::size_t d, const ScanOptions& options);

}  // namespace tfa
