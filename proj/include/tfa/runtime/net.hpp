// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tfa/runtime/matrix.hpp"

namespace tfa {

// Construction hint carried by heads whose scores are hard-gated to one
// query token (and optionally one key token). Token indices are 0-based.
struct HeadGate {
    std::size_t query = 0;
    std::optional<std::size_t> key;
    friend bool operator==(const HeadGate&, const HeadGate&) = default;
};

struct AttentionHead {
    Matrix Q, K, V;
    std::optional<HeadGate> gate;
    double cancellation = 0.0;
};

struct FfnLayer {
    Matrix W;
    std::vector<double> b;
    friend bool operator==(const FfnLayer&, const FfnLayer&) = default;
};

// Linear layers with ReLU between consecutive layers and none after the last.
// No layers at all is the zero map.
struct FeedForward {
    std::vector<FfnLayer> layers;

    std::size_t depth() const noexcept { return layers.size(); }
    std::size_t width() const noexcept;
    std::size_t in_dim() const noexcept;
    std::size_t out_dim() const noexcept;
    friend bool operator==(const FeedForward&, const FeedForward&) = default;
};

struct TransformerBlock {
    std::vector<AttentionHead> heads;
    FeedForward ffn;
    std::string provenance;
};

struct TransformerNet {
    std::size_t input_dim = 0;
    std::size_t token_count = 0;
    std::size_t embed_dim = 0;
    Matrix input_map;                // l x D
    std::vector<double> column_lift; // d_embd, first standard basis vector
    Matrix positional;               // d_embd x l
    std::vector<TransformerBlock> blocks;
    double output_clip = 0.0;
    double cancellation_scale = 0.0;
    std::string provenance;
    std::string layout;
};

struct ModelSize {
    std::size_t formula = 0;    // L_T * d_embd^2 * (3 m + L_ff)
    std::size_t learnable = 0;  // every entry of Q, K, V, W, b
    std::size_t max_heads = 0;
    std::size_t max_ffn_depth = 0;
    std::size_t max_ffn_width = 0;
};

ModelSize model_size(const TransformerNet& net);
double weight_sup_norm(const TransformerNet& net);

// Throws dimension error when any shape invariant fails, input error for
// non-finite weights.
void validate_net(const TransformerNet& net);
void validate_block(const TransformerBlock& block, std::size_t d_embd);

}  // namespace tfa
