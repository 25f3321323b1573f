// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tfa/synthesis/target.hpp"

namespace tfa {

// values[flat(n)] = f(g_n), g_n^i = (n^i - 1)/(N - 1); the first axis varies slowest.
struct GridApprox {
    std::size_t d = 0;
    std::size_t N = 0;
    std::vector<double> values;

    std::size_t patches() const noexcept { return values.size(); }
    double center(std::size_t j) const noexcept { return double(j - 1) / double(N - 1); }  // j 1-based
    // 1-based per-axis index of flat patch p (0-based)
    std::size_t axis_index(std::size_t p, std::size_t axis) const noexcept;
};

std::size_t choose_N(double eps, std::size_t d, double holder_constant, double beta);

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap);

GridApprox build_grid(const HolderTarget& target, std::size_t d, std::size_t N, std::size_t budget = 10000000);
GridApprox grid_from_values(std::size_t d, std::size_t N, std::vector<double> values);

double pou_oracle(const GridApprox& grid, std::span<const double> x);
// sum of the patch weights at x; 1 on [0,1]^d
double pou_weight_sum(std::size_t d, std::size_t N, std::span<const double> x);

// 2^d d^beta H_f / (N-1)^beta
double cube_error_bound(std::size_t d, std::size_t N, double holder_constant, double beta);

}  // namespace tfa
