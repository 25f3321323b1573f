// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/runtime/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfa/error.hpp"
#include "tfa/simd/kernels.hpp"

namespace tfa {
namespace {

std::vector<const double*> row_ptrs(const Matrix& m) {
    std::vector<const double*> p(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        p[r] = m.row(r);
    return p;
}

// W * H over all columns, bias added last.
Matrix apply_linear(const Matrix& W, const double* bias, const Matrix& H, bool relu) {
    if (W.cols() != H.rows())
        fail(ErrorKind::dimension, "linear map expects " + std::to_string(W.cols()) + " rows, got " + std::to_string(H.rows()));
    const auto& k = simd::active();
    auto rows = row_ptrs(H);
    Matrix out(W.rows(), H.cols());
    for (std::size_t r = 0; r < W.rows(); ++r)
        k.combine_rows(W.row(r), rows.data(), W.cols(), H.cols(), bias ? bias[r] : 0.0, relu, out.row(r));
    return out;
}

void check_head(const AttentionHead& head, const Matrix& H) {
    const std::size_t d = H.rows();
    for (const Matrix* m : {&head.Q, &head.K, &head.V})
        if (m->rows() != d || m->cols() != d)
            fail(ErrorKind::dimension, "head matrices must be " + std::to_string(d) + "x" + std::to_string(d));
}

}  // namespace

EmbeddingMatrix attention_forward(const AttentionHead& head, const EmbeddingMatrix& H) {
    check_head(head, H);
    Matrix qh = apply_linear(head.Q, nullptr, H, false);
    Matrix kh = apply_linear(head.K, nullptr, H, false);
    Matrix vh = apply_linear(head.V, nullptr, H, false);
    Matrix out(H.rows(), H.cols());
    simd::active().attention(qh.data().data(), kh.data().data(), vh.data().data(), H.rows(), H.cols(),
                             out.data().data());
    return out;
}

EmbeddingMatrix mha_forward(const std::vector<AttentionHead>& heads, const EmbeddingMatrix& H) {
    if (heads.empty())
        return Matrix(H.rows(), H.cols());
    Matrix out = attention_forward(heads[0], H);
    for (std::size_t j = 1; j < heads.size(); ++j) {
        Matrix a = attention_forward(heads[j], H);
        auto& o = out.data();
        const auto& av = a.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = o[i] + av[i];
    }
    return out;
}

EmbeddingMatrix ffn_forward(const FeedForward& ffn, const EmbeddingMatrix& H) {
    if (ffn.layers.empty())
        return Matrix(H.rows(), H.cols());
    if (ffn.in_dim() != H.rows() || ffn.out_dim() != H.rows())
        fail(ErrorKind::dimension, "ffn does not map d_embd to d_embd");
    Matrix a = H;
    for (std::size_t i = 0; i < ffn.layers.size(); ++i) {
        const auto& layer = ffn.layers[i];
        if (layer.b.size() != layer.W.rows())
            fail(ErrorKind::dimension, "ffn bias length mismatch");
        a = apply_linear(layer.W, layer.b.data(), a, i + 1 < ffn.layers.size());
    }
    return a;
}

std::vector<double> ffn_apply(const FeedForward& ffn, std::span<const double> h) {
    Matrix col(h.size(), 1);
    for (std::size_t r = 0; r < h.size(); ++r)
        col(r, 0) = h[r];
    Matrix out = ffn_forward(ffn, col);
    return out.data();
}

EmbeddingMatrix block_forward(const TransformerBlock& block, const EmbeddingMatrix& H) {
    Matrix x = mha_forward(block.heads, H);
    auto& xv = x.data();
    const auto& hv = H.data();
    for (std::size_t i = 0; i < xv.size(); ++i)
        xv[i] = xv[i] + hv[i];
    Matrix y = ffn_forward(block.ffn, x);
    auto& yv = y.data();
    for (std::size_t i = 0; i < yv.size(); ++i)
        yv[i] = yv[i] + xv[i];
    return y;
}

EmbeddingMatrix embed(const TransformerNet& net, std::span<const double> x) {
    if (x.size() != net.input_dim)
        fail(ErrorKind::dimension, "input has length " + std::to_string(x.size()) + ", net expects " + std::to_string(net.input_dim));
    for (double v : x)
        if (!std::isfinite(v))
            fail(ErrorKind::input, "non-finite input");
    const std::size_t d = net.embed_dim, l = net.token_count;
    Matrix H = net.positional;
    for (std::size_t t = 0; t < l; ++t) {
        double u = dot_ordered(net.input_map.row(t), x.data(), x.size());
        for (std::size_t r = 0; r < d; ++r)
            H(r, t) = H(r, t) + net.column_lift[r] * u;
    }
    return H;
}

double decode(const TransformerNet& net, const EmbeddingMatrix& H) {
    double v = H(0, H.cols() - 1);
    return std::clamp(v, -net.output_clip, net.output_clip);
}

EmbeddingMatrix net_hidden(const TransformerNet& net, std::span<const double> x, std::size_t upto) {
    Matrix H = embed(net, x);
    const std::size_t n = std::min(upto, net.blocks.size());
    for (std::size_t b = 0; b < n; ++b) {
        H = block_forward(net.blocks[b], H);
        if (!H.all_finite())
            throw OverflowError(b, "non-finite value after block " + std::to_string(b));
    }
    return H;
}

double net_forward(const TransformerNet& net, std::span<const double> x) {
    return decode(net, net_hidden(net, x));
}

}  // namespace tfa
