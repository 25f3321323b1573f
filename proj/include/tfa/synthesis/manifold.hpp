// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tfa/blocks/block_spec.hpp"
#include "tfa/synthesis/atlas.hpp"
#include "tfa/synthesis/cube.hpp"
#include "tfa/synthesis/grid.hpp"
#include "tfa/synthesis/target.hpp"

namespace tfa {

struct ManifoldOptions {
    double ramp_width = 0.0;  // 0: eps r / (2 max(1, H_f))
    std::size_t token_cap = 1000000;
    std::size_t grid_budget = 10000000;
    std::size_t holder_resolution = 0;  // per-axis samples for the local Lipschitz estimate; 0: automatic
    double holder_safety = 1.1;
    double inversion_tol = 1e-10;
};

// Everything the net and the oracle share: per-chart grids of the local
// functions (f rho_n) o phi_n^{-1}.
struct ManifoldModel {
    Atlas atlas;
    HolderTarget target;
    double eps = 0.1;
    double ramp_width = 0.0;
    double delta1 = 0.0;        // per-chart cube accuracy
    std::size_t overlap = 0;    // most charts whose ball holds one manifold point
    double local_holder = 0.0;  // Lipschitz constant of the local functions, phi coordinates
    std::size_t N = 0;
    std::size_t outside_points = 0;  // grid points whose preimage left the chart
    std::vector<GridApprox> grids;
};

ManifoldModel build_manifold_model(const Atlas& atlas, const HolderTarget& target, double eps,
                                   const ManifoldOptions& options = {});

// Point x on the manifold with phi_n(x) = y, found by projected iteration from
// the chart center. Returns false when the iteration fails or leaves the chart.
bool invert_projection(const Atlas& atlas, std::size_t chart, std::span<const double> y, double tol,
                       std::vector<double>& x);
double local_function(const Atlas& atlas, const HolderTarget& target, std::size_t chart,
                      std::span<const double> y, double tol);

// 1 below r2 - delta, 0 above r2, linear in between
double indicator(double s, double r2, double delta);

double manifold_oracle(const ManifoldModel& model, std::span<const double> x);

// Layout: x tokens 1..D, output slots D+1..D+d.
BlockSpec chart_projection_spec(const Chart& chart, std::size_t D, double ambient_bound);
MaterializedBlock synthesize_chart_projection(const Chart& chart, std::size_t D, double ambient_bound);
// Runs the projection block densely on each point and returns the largest
// deviation from chart.project; `cancellation` receives the block constant.
double chart_projection_error(const Chart& chart, std::size_t D, double ambient_bound,
                              const std::vector<std::vector<double>>& points, double* cancellation = nullptr);

// Layout: x tokens 1..D, work D+1..2D, indicator token 2D+1 (value left in row 1).
FeedForward make_ramp_ffn(double r2, double delta);
std::vector<BlockSpec> indicator_specs(const Chart& chart, double delta, std::size_t D, double ambient_bound);
std::vector<MaterializedBlock> synthesize_indicator_net(const Chart& chart, double delta, std::size_t D,
                                                        double ambient_bound);

struct ManifoldLayout {
    std::size_t D = 0, d = 0, charts = 0;
    CubeLayout cube;
    std::size_t lane = 0, tokens = 0;

    ManifoldLayout() = default;
    ManifoldLayout(std::size_t D, std::size_t d, std::size_t charts, std::size_t N, std::size_t cap);
    std::size_t base(std::size_t c) const noexcept { return c * lane; }  // c 0-based
    std::size_t x_token(std::size_t c, std::size_t j) const noexcept { return base(c) + j; }
    std::size_t cube_token(std::size_t c, std::size_t t) const noexcept { return base(c) + D + t; }
    std::size_t copy_token(std::size_t c, std::size_t j) const noexcept { return base(c) + D + cube.tokens + j; }
    std::size_t work_token(std::size_t c, std::size_t j) const noexcept { return copy_token(c, D + j); }
    std::size_t indicator_token(std::size_t c) const noexcept { return copy_token(c, 2 * D + 1); }
    std::size_t output_token() const noexcept { return tokens; }
};

struct ManifoldNet {
    TransformerNet net;
    ManifoldLayout layout;
    std::size_t projection_block = 0;
    std::size_t indicator_block = 0;  // block after which indicator tokens hold their value
};

ManifoldNet synthesize_manifold_approximator(const ManifoldModel& model, const ManifoldOptions& options = {});

}  // namespace tfa
