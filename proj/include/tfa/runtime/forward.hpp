// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <span>
#include <vector>

#include "tfa/runtime/net.hpp"

namespace tfa {

// Dense reference engine. Kernels come from simd::active().
EmbeddingMatrix attention_forward(const AttentionHead& head, const EmbeddingMatrix& H);
EmbeddingMatrix mha_forward(const std::vector<AttentionHead>& heads, const EmbeddingMatrix& H);
EmbeddingMatrix ffn_forward(const FeedForward& ffn, const EmbeddingMatrix& H);
EmbeddingMatrix block_forward(const TransformerBlock& block, const EmbeddingMatrix& H);

std::vector<double> ffn_apply(const FeedForward& ffn, std::span<const double> h);

EmbeddingMatrix embed(const TransformerNet& net, std::span<const double> x);
double decode(const TransformerNet& net, const EmbeddingMatrix& H);

// Embedding matrix after the first `upto` blocks (all blocks by default).
EmbeddingMatrix net_hidden(const TransformerNet& net, std::span<const double> x,
                           std::size_t upto = static_cast<std::size_t>(-1));
double net_forward(const TransformerNet& net, std::span<const double> x);

// Same dot-product ordering as the dense kernels.
inline double dot_ordered(const double* w, const double* h, std::size_t n) noexcept {
    double acc = n ? w[0] * h[0] : 0.0;
    for (std::size_t c = 1; c < n; ++c)
        acc = acc + w[c] * h[c];
    return acc;
}

}  // namespace tfa
