// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfa/runtime/matrix.hpp"

namespace tfa {

struct Chart {
    std::vector<double> center;  // D
    double radius = 0.0;
    Matrix basis;                // D x d, orthonormal columns
    double scale = 1.0;
    std::vector<double> offset;  // d

    // s (V^T (x - c) + u)
    std::vector<double> project(std::span<const double> x) const;
    // V^T (x - c)
    std::vector<double> tangent(std::span<const double> x) const;
};

enum class ManifoldShape { circle, sphere, flat_patch };

ManifoldShape shape_from_name(const std::string& name);
const char* shape_name(ManifoldShape s);

struct AtlasParams {
    double radius = 0.0;            // 0: reach / 4 (flat patch: 0.5)
    std::size_t intrinsic_dim = 2;  // sphere and flat patch
    std::size_t ambient_dim = 3;    // flat patch
    double cover_threshold = 1e-3;
    std::size_t validation_samples = 4096;
};

struct Atlas {
    ManifoldShape shape = ManifoldShape::circle;
    std::size_t D = 0, d = 0;
    std::vector<Chart> charts;
    double reach = 1.0;
    double ambient_bound = 1.0;   // max |x_j| on the manifold
    double cover_threshold = 1e-3;
    // flat patch: {origin + basis t : |t| <= extent}
    std::vector<double> origin;
    Matrix plane;
    double extent = 0.0;

    std::vector<double> closest_point(std::span<const double> x) const;
    bool on_manifold(std::span<const double> x, double tol = 1e-9) const;
    std::vector<std::vector<double>> sample(std::size_t n, std::uint64_t seed) const;
    // deterministic, roughly even cover of the manifold
    std::vector<std::vector<double>> validation_points(std::size_t n) const;

    double bump(std::size_t chart, std::span<const double> x) const;
    double bump_sum(std::span<const double> x) const;
    double pou(std::size_t chart, std::span<const double> x) const;
};

Atlas make_atlas(ManifoldShape shape, std::size_t chart_count, const AtlasParams& params = {});
Atlas atlas_from_json(const nlohmann::json& spec);
// orthonormal bases, r <= reach/4, coverage, projection into [0,1]^d
void validate_atlas(const Atlas& atlas, std::size_t samples);

}  // namespace tfa
