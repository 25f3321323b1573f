// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfa {

struct LossPoint {
    double n = 0.0;
    double loss = 0.0;
};

enum class FitMode { plain, offset };
FitMode fit_mode_from_name(const std::string& name);
const char* fit_mode_name(FitMode m);

// loss ~ E + B n^-exponent
struct ScalingFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double offset = 0.0;
    double residual = 0.0;  // RMS of the log-space residuals
    std::size_t points = 0;
    FitMode mode = FitMode::plain;

    double predict(double n) const;
};

inline constexpr std::size_t offset_grid_size = 64;

ScalingFit fit_power_law(std::span<const LossPoint> points, FitMode mode = FitMode::plain);

// CSV with a header naming columns n and loss (any order, extra columns ignored)
std::vector<LossPoint> read_loss_csv(std::istream& in);
std::vector<LossPoint> load_loss_csv(const std::string& path);

nlohmann::json to_json(const ScalingFit& fit);

}  // namespace tfa
