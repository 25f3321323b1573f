// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tfa/blocks/block_spec.hpp"
#include "tfa/runtime/net.hpp"
#include "tfa/synthesis/grid.hpp"

namespace tfa {

// Canonical token layout, 1-based:
//   inputs i                 -> i
//   s-slot (i, j)            -> d + (i-1) N + j
//   patch slot (n, i)        -> d + N d + (n-1) d_pad + i,  n = flat patch index + 1
struct CubeLayout {
    std::size_t d = 0, N = 0, d_pad = 0, patches = 0, tokens = 0;

    CubeLayout() = default;
    CubeLayout(std::size_t d, std::size_t N, std::size_t token_cap = 1000000);

    std::size_t input(std::size_t i) const noexcept { return i; }
    std::size_t s_slot(std::size_t i, std::size_t j) const noexcept { return d + (i - 1) * N + j; }
    std::size_t patch_slot(std::size_t n, std::size_t i) const noexcept { return d + N * d + (n - 1) * d_pad + i; }
    std::size_t levels() const noexcept;
    std::string describe() const;
};

struct CubeMeta {
    double holder_constant = 1.0;
    double beta = 1.0;
    double sup_bound = 1.0;
};

struct CubeOptions {
    std::size_t token_cap = 1000000;
};

// Stages shared with the manifold construction. data_bound is the bound on
// |inputs| (1 on the unit cube).
BlockSpec cube_precompute_spec(const CubeLayout& L, double data_bound);
BlockSpec cube_copy_spec(const CubeLayout& L, double data_bound);
std::vector<BlockSpec> cube_product_specs(const CubeLayout& L, double data_bound);
FeedForward cube_precompute_ffn(std::size_t N);

std::size_t cube_block_count(std::size_t d);

// every block of the cube net in order; values are the N^d grid values, R the clip
std::vector<BlockSpec> cube_block_specs(const CubeLayout& L, std::span<const double> values, double R);

TransformerNet synthesize_cube_approximator(const GridApprox& grid, const CubeMeta& meta,
                                            const CubeOptions& options = {});

}  // namespace tfa
