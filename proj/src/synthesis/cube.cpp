// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "tfa/error.hpp"

namespace tfa {
namespace {

DataKernelPair kernel(std::size_t qcol, double qval, std::size_t kcol, double kval, std::size_t kcol2 = 5,
                      double kval2 = 0.0) {
    Matrix q(2, 5), k(2, 5);
    q(0, qcol) = qval;
    k(0, kcol) = kval;
    if (kcol2 < 5)
        k(0, kcol2) = kval2;
    return DataKernelPair::fitted(std::move(q), std::move(k));
}

HeadSpec head(std::size_t t1, std::optional<std::size_t> t2, std::size_t out_row, DataKernelPair kp,
              double sign = 1.0) {
    HeadSpec h;
    h.t1 = t1;
    h.t2 = t2;
    h.out_row = out_row;
    h.kernels = std::move(kp);
    h.sign = sign;
    return h;
}

}  // namespace

CubeLayout::CubeLayout(std::size_t d_, std::size_t N_, std::size_t cap) : d(d_), N(N_) {
    if (d == 0 || N < 2)
        fail(ErrorKind::parameter, "cube layout needs d >= 1 and N >= 2");
    d_pad = std::bit_ceil(d);
    patches = checked_power(N, d, cap);
    const std::size_t big = std::numeric_limits<std::size_t>::max();
    if (patches > cap || patches > (big - d - N * d) / d_pad)
        fail(ErrorKind::resource, "cube layout exceeds the token cap " + std::to_string(cap));
    tokens = d + N * d + patches * d_pad;
    if (tokens > cap)
        fail(ErrorKind::resource, "cube layout needs " + std::to_string(tokens) + " tokens, cap is " +
                                      std::to_string(cap));
}

std::size_t CubeLayout::levels() const noexcept { return std::size_t(std::countr_zero(d_pad)); }

std::string CubeLayout::describe() const {
    return "inputs[1.." + std::to_string(d) + "] | s(i,j) row-major [" + std::to_string(d + 1) + ".." +
           std::to_string(d + N * d) + "] | patch(n,i) row-major [" + std::to_string(d + N * d + 1) + ".." +
           std::to_string(tokens) + "]; d=" + std::to_string(d) + " N=" + std::to_string(N) +
           " d_pad=" + std::to_string(d_pad);
}

std::size_t cube_block_count(std::size_t d) { return std::size_t(std::countr_zero(std::bit_ceil(d))) + 4; }

FeedForward cube_precompute_ffn(std::size_t N) {
    const double scale = 3.0 * double(N - 1);
    return make_trapezoid_delta_ffn(scale, -scale);
}

BlockSpec cube_precompute_spec(const CubeLayout& L, double b) {
    BlockSpec s;
    s.tokens = L.tokens;
    s.data_bound = std::max(b, 1.0);
    s.ffn_input_bound = s.data_bound + 2.0;
    s.provenance = "cube/precompute";
    s.heads.reserve(L.d * L.N);
    for (std::size_t i = 1; i <= L.d; ++i)
        for (std::size_t j = 1; j <= L.N; ++j) {
            const double g = double(j - 1) / double(L.N - 1);
            // x_i - g_j + 1, nonnegative on the cube
            s.heads.push_back(head(L.s_slot(i, j), L.input(i), 2, kernel(4, 1.0, 0, 1.0, 4, 1.0 - g)));
        }
    s.ffn = FfnSpec::independent(cube_precompute_ffn(L.N));
    return s;
}

BlockSpec cube_copy_spec(const CubeLayout& L, double b) {
    BlockSpec s;
    s.tokens = L.tokens;
    s.data_bound = std::max(b, 1.0);
    s.provenance = "cube/copy";
    s.heads.reserve(L.patches * L.d_pad);
    const GridApprox shape{L.d, L.N, {}};
    for (std::size_t n = 1; n <= L.patches; ++n)
        for (std::size_t i = 1; i <= L.d_pad; ++i) {
            const std::size_t t = L.patch_slot(n, i);
            if (i <= L.d)
                s.heads.push_back(head(t, L.s_slot(i, shape.axis_index(n - 1, i - 1)), 1, kernel(4, 1.0, 0, 1.0)));
            else
                s.heads.push_back(head(t, t, 1, kernel(4, 1.0, 4, 1.0)));
        }
    return s;
}

std::vector<BlockSpec> cube_product_specs(const CubeLayout& L, double b) {
    std::vector<BlockSpec> out;
    for (std::size_t k = 1; k <= L.levels(); ++k) {
        const std::size_t stride = std::size_t(1) << (k - 1);
        BlockSpec s;
        s.tokens = L.tokens;
        s.data_bound = std::max(b, 1.0);
        s.provenance = "cube/product" + std::to_string(k);
        for (std::size_t n = 1; n <= L.patches; ++n)
            for (std::size_t i = 1; i <= L.d_pad; i += 2 * stride) {
                const std::size_t left = L.patch_slot(n, i), right = L.patch_slot(n, i + stride);
                // p_L + (p_L p_R - p_L)
                s.heads.push_back(head(left, right, 1, kernel(0, 1.0, 0, 1.0)));
                s.heads.push_back(head(left, left, 1, kernel(0, 1.0, 4, 1.0), -1.0));
            }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<BlockSpec> cube_block_specs(const CubeLayout& L, std::span<const double> values, double R) {
    std::vector<BlockSpec> specs;
    specs.push_back(cube_precompute_spec(L, 1.0));
    specs.push_back(cube_copy_spec(L, 1.0));
    for (auto& p : cube_product_specs(L, 1.0))
        specs.push_back(std::move(p));

    BlockSpec mul;
    mul.tokens = L.tokens;
    mul.data_bound = std::max(R, 1.0);
    mul.provenance = "cube/multiply";
    for (std::size_t n = 1; n <= L.patches; ++n) {
        const double f = values[n - 1];
        if (f == 0.0)
            continue;
        const std::size_t t = L.patch_slot(n, 1);
        mul.heads.push_back(head(t, t, 2, kernel(0, 1.0, 4, std::fabs(f)), f > 0.0 ? 1.0 : -1.0));
    }
    // clear row 1 of the decoder token; it holds a nonnegative partial product
    mul.heads.push_back(head(L.tokens, L.tokens, 1, kernel(0, 1.0, 4, 1.0), -1.0));
    specs.push_back(std::move(mul));

    BlockSpec sum;
    sum.tokens = L.tokens;
    sum.data_bound = std::max(R, 1.0);
    sum.provenance = "cube/sum";
    sum.heads.push_back(head(L.tokens, std::nullopt, 1, kernel(4, 1.0, 1, 1.0)));
    sum.heads.push_back(head(L.tokens, std::nullopt, 1, kernel(4, 1.0, 1, -1.0), -1.0));
    specs.push_back(std::move(sum));
    return specs;
}

TransformerNet synthesize_cube_approximator(const GridApprox& grid, const CubeMeta& meta, const CubeOptions& opt) {
    if (grid.values.size() != checked_power(grid.N, grid.d, std::numeric_limits<std::size_t>::max()))
        fail(ErrorKind::dimension, "grid value count is not N^d");
    if (!(meta.sup_bound > 0.0))
        fail(ErrorKind::parameter, "sup bound must be positive");
    const CubeLayout L(grid.d, grid.N, opt.token_cap);
    double R = meta.sup_bound;
    for (double v : grid.values)
        R = std::max(R, std::fabs(v));

    TransformerNet net;
    net.input_dim = grid.d;
    net.token_count = L.tokens;
    net.embed_dim = 5;
    net.input_map = Matrix(L.tokens, grid.d);
    for (std::size_t i = 1; i <= grid.d; ++i)
        net.input_map(L.input(i) - 1, i - 1) = 1.0;
    net.column_lift = {1.0, 0.0, 0.0, 0.0, 0.0};
    net.positional = StructuredLayout(L.tokens, 1.0).positional();
    net.output_clip = R;
    net.provenance = "cube";
    net.layout = L.describe();
    for (const auto& s : cube_block_specs(L, grid.values, R)) {
        auto m = materialize(s);
        net.cancellation_scale = std::max(net.cancellation_scale, m.cancellation);
        net.blocks.push_back(std::move(m.block));
    }
    return net;
}

}  // namespace tfa
