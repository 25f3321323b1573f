// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/runtime/net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfa/error.hpp"

namespace tfa {

std::size_t FeedForward::width() const noexcept {
    std::size_t w = 0;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
        w = std::max(w, layers[i].W.rows());
    return w;
}

std::size_t FeedForward::in_dim() const noexcept { return layers.empty() ? 0 : layers.front().W.cols(); }

std::size_t FeedForward::out_dim() const noexcept { return layers.empty() ? 0 : layers.back().W.rows(); }

ModelSize model_size(const TransformerNet& net) {
    ModelSize s;
    for (const auto& b : net.blocks) {
        s.max_heads = std::max(s.max_heads, b.heads.size());
        s.max_ffn_depth = std::max(s.max_ffn_depth, b.ffn.depth());
        s.max_ffn_width = std::max(s.max_ffn_width, b.ffn.width());
        for (const auto& h : b.heads)
            s.learnable += h.Q.data().size() + h.K.data().size() + h.V.data().size();
        for (const auto& layer : b.ffn.layers)
            s.learnable += layer.W.data().size() + layer.b.size();
    }
    const std::size_t d2 = net.embed_dim * net.embed_dim;
    s.formula = net.blocks.size() * d2 * (3 * s.max_heads + s.max_ffn_depth);
    return s;
}

double weight_sup_norm(const TransformerNet& net) {
    double m = std::max(net.input_map.max_abs(), net.positional.max_abs());
    for (const auto& b : net.blocks) {
        for (const auto& h : b.heads)
            m = std::max({m, h.Q.max_abs(), h.K.max_abs(), h.V.max_abs()});
        for (const auto& layer : b.ffn.layers) {
            m = std::max(m, layer.W.max_abs());
            for (double v : layer.b)
                m = std::max(m, std::fabs(v));
        }
    }
    return m;
}

void validate_block(const TransformerBlock& block, std::size_t d) {
    for (std::size_t j = 0; j < block.heads.size(); ++j) {
        const auto& h = block.heads[j];
        for (const Matrix* m : {&h.Q, &h.K, &h.V}) {
            if (m->rows() != d || m->cols() != d)
                fail(ErrorKind::dimension, "head " + std::to_string(j) + " is not " + std::to_string(d) + "x" + std::to_string(d));
            if (!m->all_finite())
                fail(ErrorKind::input, "head " + std::to_string(j) + " has non-finite weights");
        }
    }
    const auto& layers = block.ffn.layers;
    std::size_t in = d;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].W.cols() != in || layers[i].b.size() != layers[i].W.rows())
            fail(ErrorKind::dimension, "ffn layer " + std::to_string(i) + " does not compose");
        if (!layers[i].W.all_finite())
            fail(ErrorKind::input, "ffn layer " + std::to_string(i) + " has non-finite weights");
        for (double v : layers[i].b)
            if (!std::isfinite(v))
                fail(ErrorKind::input, "ffn layer " + std::to_string(i) + " has non-finite bias");
        in = layers[i].W.rows();
    }
    if (!layers.empty() && in != d)
        fail(ErrorKind::dimension, "ffn output is not d_embd");
}

void validate_net(const TransformerNet& net) {
    const std::size_t d = net.embed_dim, l = net.token_count;
    if (d == 0 || l == 0)
        fail(ErrorKind::dimension, "empty embedding");
    if (net.input_map.rows() != l || net.input_map.cols() != net.input_dim)
        fail(ErrorKind::dimension, "input map must be l x D");
    if (net.column_lift.size() != d)
        fail(ErrorKind::dimension, "column lift must have length d_embd");
    for (std::size_t r = 0; r < d; ++r)
        if (net.column_lift[r] != (r == 0 ? 1.0 : 0.0))
            fail(ErrorKind::dimension, "column lift must be the first standard basis vector");
    if (net.positional.rows() != d || net.positional.cols() != l)
        fail(ErrorKind::dimension, "positional must be d_embd x l");
    if (!net.input_map.all_finite() || !net.positional.all_finite())
        fail(ErrorKind::input, "non-finite embedding weights");
    if (!(net.output_clip >= 0.0) || !std::isfinite(net.output_clip))
        fail(ErrorKind::parameter, "output clip must be a finite nonnegative number");
    for (const auto& b : net.blocks)
        validate_block(b, d);
}

}  // namespace tfa
