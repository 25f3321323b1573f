// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/scaling/architecture.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "tfa/error.hpp"
#include "tfa/synthesis/cube.hpp"
#include "tfa/synthesis/grid.hpp"

namespace tfa {
namespace {

double max_entry(const TransformerBlock& b) {
    double m = 0.0;
    for (const auto& h : b.heads)
        m = std::max({m, h.Q.max_abs(), h.K.max_abs(), h.V.max_abs()});
    for (const auto& layer : b.ffn.layers) {
        m = std::max(m, layer.W.max_abs());
        for (double v : layer.b)
            m = std::max(m, std::fabs(v));
    }
    return m;
}

// head weights differ across tokens only through I_t, so a spread of
// representatives pins the largest entry
BlockSpec representatives(const BlockSpec& s, std::size_t keep) {
    if (s.heads.size() <= keep)
        return s;
    BlockSpec r = s;
    r.heads.clear();
    for (std::size_t k = 0; k < keep; ++k)
        r.heads.push_back(s.heads[k * (s.heads.size() - 1) / (keep - 1)]);
    return r;
}

}  // namespace

ArchPrediction predicted_architecture(const ArchRequest& q) {
    if (q.d == 0)
        fail(ErrorKind::domain, "d must be positive");
    if (!(q.beta > 0.0 && q.beta <= 1.0))
        fail(ErrorKind::domain, "beta must lie in (0, 1]");
    if (!(q.sup_bound > 0.0))
        fail(ErrorKind::domain, "sup bound must be positive");
    const double d = double(q.d);
    ArchPrediction out;
    if (q.mode == ArchMode::approximation) {
        if (!(q.eps > 0.0))
            fail(ErrorKind::domain, "eps must be positive");
        out.N = choose_N(q.eps, q.d, q.holder_constant, q.beta);
        out.grid_driver = std::pow(q.eps, -d / q.beta);
        out.drivers = "N^d ~ eps^(-d/beta), l ~ d eps^(-d/beta), L_T = log2(d_pad) + 4, L_ff = O(log(1/eps))";
        out.params.delta = std::min(1.0, q.eps);
    } else {
        if (!(q.n > 1.0))
            fail(ErrorKind::domain, "n must exceed 1");
        out.grid_driver = std::pow(q.n, d / (2.0 * q.beta + d));
        const double per_axis = std::ceil(std::pow(out.grid_driver, 1.0 / d) * (1.0 - 1e-12));
        out.N = std::size_t(std::max(2.0, per_axis));
        out.drivers = "N^d ~ n^(d/(2beta+d)), l ~ d n^(d/(2beta+d)), L_T = log2(d_pad) + 4";
        out.params.delta = 1.0 / q.n;
    }
    out.token_driver = d * out.grid_driver;

    const std::size_t d_pad = std::bit_ceil(q.d);
    const double N = double(out.N), patches = std::pow(N, d);
    ArchParams& p = out.params;
    p.d_embd = double(StructuredLayout::d_embd);
    p.L_T = double(cube_block_count(q.d));
    p.l = d + N * d + patches * double(d_pad);
    p.D = d;
    p.R = q.sup_bound;
    p.M = std::max(2.0, q.sup_bound);

    const FeedForward ffn = cube_precompute_ffn(out.N);
    p.L_ff = double(ffn.depth());
    p.w_ff = double(ffn.width());
    double kappa = 1.0;
    for (const auto& layer : ffn.layers) {
        kappa = std::max(kappa, layer.W.max_abs());
        for (double v : layer.b)
            kappa = std::max(kappa, std::fabs(v));
    }

    bool fits = p.l <= double(q.token_cap);
    if (fits) {
        try {
            const CubeLayout L(q.d, out.N, q.token_cap);
            const std::vector<double> values(L.patches, q.sup_bound);
            std::size_t m = 0;
            for (const auto& s : cube_block_specs(L, values, q.sup_bound)) {
                m = std::max(m, s.heads.size());
                kappa = std::max(kappa, max_entry(materialize(representatives(s, 65)).block));
            }
            p.m = double(m);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::resource)
                throw;
            fits = false;
        }
    }
    if (!fits) {
        p.m = std::max({d * N, patches * double(d_pad), patches + 1.0, 2.0});
        const double l_sat = std::min(p.l, 4.0e18);
        const double kb = std::max(1.0, q.sup_bound);
        kappa = std::max(kappa, interaction_constant(kb, p.M, std::size_t(l_sat)));
    }
    out.materialized = fits;
    p.kappa = kappa;
    const double size = p.L_T * p.d_embd * p.d_embd * (3.0 * p.m + p.L_ff);
    out.model_size = size < 1.8e19 ? std::size_t(size) : std::numeric_limits<std::size_t>::max();
    return out;
}

nlohmann::json to_json(const ArchPrediction& p) {
    return {{"params", to_json(p.params)}, {"N", p.N},
            {"patch_driver", p.grid_driver}, {"token_driver", p.token_driver},
            {"materialized", p.materialized}, {"model_size", p.model_size},
            {"drivers", p.drivers}};
}

}  // namespace tfa
