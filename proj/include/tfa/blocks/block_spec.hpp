// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tfa/blocks/builders.hpp"
#include "tfa/blocks/layout.hpp"
#include "tfa/runtime/net.hpp"

namespace tfa {

// Blocks are kept in this symbolic form until the final token count is known,
// so heads and gates can be re-targeted when layouts are concatenated.
struct HeadSpec {
    std::size_t t1 = 1;
    std::optional<std::size_t> t2;  // empty: query-only head summing over keys
    std::size_t out_row = 1;
    DataKernelPair kernels;
    double sign = 1.0;
};

struct FfnSpec {
    enum class Kind { none, independent, gated, parallel, opaque };
    Kind kind = Kind::none;
    FeedForward delta;               // independent, gated; must not read rows 3..4
    std::size_t first = 1, last = 1; // gated token range, inclusive
    std::vector<FfnSpec> branches;   // parallel: gated or independent leaves
    FeedForward fixed;               // opaque: used as is, cannot be re-targeted

    static FfnSpec independent(FeedForward f);
    static FfnSpec gated(FeedForward f, std::size_t first, std::size_t last);
    static FfnSpec opaque(FeedForward f);
};

struct BlockSpec {
    std::size_t tokens = 0;
    double data_bound = 1.0;       // |data| entering the block
    double ffn_input_bound = 0.0;  // |data| after attention; 0 means data_bound
    std::vector<HeadSpec> heads;
    FfnSpec ffn;
    std::string provenance;

    StructuredLayout layout() const { return StructuredLayout(tokens, data_bound); }
};

struct MaterializedBlock {
    TransformerBlock block;
    double cancellation = 0.0;  // largest constant among heads and gates
};

MaterializedBlock materialize(const BlockSpec& spec);

BlockSpec empty_block(std::size_t tokens, double data_bound = 1.0);
// keep_independent: an independent ffn stays independent, for ffns that are
// inert on the tokens the block does not own.
BlockSpec shift_block(const BlockSpec& spec, std::size_t offset, std::size_t tokens, bool keep_independent = false);

// a on tokens 1..la, b on la+1..la+lb
BlockSpec parallelize(const BlockSpec& a, const BlockSpec& b);
BlockSpec parallelize(const std::vector<BlockSpec>& parts);

struct ParallelBlock {
    TransformerBlock block;
    StructuredLayout layout;
    BlockSpec spec;
    double cancellation = 0.0;
};
ParallelBlock parallelize_blocks(const BlockSpec& a, const BlockSpec& b);

// x on tokens 1..D, zero data on D+1..2D; writes x - c to row 1 of D+1..2D.
BlockSpec make_addition_spec(const std::vector<double>& c, const StructuredLayout& layout);
MaterializedBlock make_addition_block(const std::vector<double>& c, const StructuredLayout& layout);

}  // namespace tfa
