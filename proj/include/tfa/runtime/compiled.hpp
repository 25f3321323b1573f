// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tfa/runtime/net.hpp"

namespace tfa {

// Sparse evaluator for structured nets (d_embd = 5, rows 3..5 never written).
// Tokens whose data rows are zero are skipped; gated heads are applied only
// when their tokens carry data, after a per-block norm certificate shows every
// other query/key pair scores below zero. Blocks that fail the structural or
// runtime checks run through the dense engine. Results equal net_forward up to
// the sign of zero.
class CompiledNet {
public:
    struct Stats {
        std::size_t sparse_blocks = 0;
        std::size_t dense_blocks = 0;
        std::size_t certificate_fallbacks = 0;
        std::size_t heads_evaluated = 0;
        std::size_t ffn_tokens = 0;
    };

    class Workspace;
    struct WorkspaceDeleter {
        void operator()(Workspace* ws) const noexcept;
    };
    using WorkspacePtr = std::unique_ptr<Workspace, WorkspaceDeleter>;

    // `net` must outlive the compiled form.
    explicit CompiledNet(const TransformerNet& net);
    ~CompiledNet();
    CompiledNet(CompiledNet&&) noexcept;
    CompiledNet& operator=(CompiledNet&&) noexcept;

    const TransformerNet& net() const noexcept { return *net_; }
    bool structured() const noexcept { return structured_; }
    // reason the net is evaluated densely, empty when structured
    const std::string& dense_reason() const noexcept { return dense_reason_; }

    WorkspacePtr make_workspace() const;

    double evaluate(std::span<const double> x, Workspace& ws, Stats* stats = nullptr) const;
    double evaluate(std::span<const double> x) const;

    // data rows 1..2 of every token after all blocks, for cross-checks
    EmbeddingMatrix hidden(std::span<const double> x) const;

    struct GatedHead;
    struct BlockPlan;

private:
    void run(std::span<const double> x, Workspace& ws, Stats* stats) const;
    void run_sparse_block(std::size_t b, Workspace& ws, Stats* stats) const;
    void run_dense_block(std::size_t b, Workspace& ws) const;

    const TransformerNet* net_;
    bool structured_ = false;
    std::string dense_reason_;
    std::vector<double> frame_;   // 3 x l, rows 3..5 of positional
    double frame_norm2_max_ = 0.0;
    std::vector<std::uint32_t> seeds_;  // tokens with input weights or positional data
    std::vector<BlockPlan> plans_;
};

// Largest gate value over tokens other than `target` for a gate row acting on
// the frame, using the arc ordering of the interaction terms (with a rounding
// slack), or by brute force when `brute` is set.
double gate_max_off_target(const double* row, const std::vector<double>& frame, std::size_t l,
                           std::size_t target, bool brute);

}  // namespace tfa
