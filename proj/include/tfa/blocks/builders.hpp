// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <vector>

#include "tfa/blocks/layout.hpp"
#include "tfa/runtime/net.hpp"

namespace tfa {

struct InteractionHead {
    AttentionHead head;
    double C = 0.0;
};

// 2 d^4 kappa^2 M^2 / (1 - cos(pi/(2l))) + 1 with d = 5 and M at least 1
// (the constant row of every token is part of the magnitude).
double interaction_constant(double kappa, double magnitude, std::size_t l);

// Output at token t1 is sign * relu(<QB h_t1, KB h_t2>) in row out_row, zero at
// every other token.
InteractionHead make_interaction_head(std::size_t t1, std::size_t t2, std::size_t out_row,
                                      const DataKernelPair& kernels, const StructuredLayout& layout,
                                      double sign = 1.0);

// Query-only variant: output at t1 is sign * sum_k relu(<QB h_t1, KB h_k>) in
// row out_row, zero elsewhere.
InteractionHead make_query_head(std::size_t t1, std::size_t out_row, const DataKernelPair& kernels,
                                const StructuredLayout& layout, double sign = 1.0);

enum class KeepSide { prefix, suffix };

double gating_constant(const StructuredLayout& layout);

// Pivot k: prefix keeps tokens 1..k, suffix keeps k+1..l. Dropped tokens map
// to (0, 0, I_t, 1).
FeedForward make_gating_ffn(std::size_t k, KeepSide side, const StructuredLayout& layout);

// psi(u) from row 1 into row 1, other rows zero; one hidden layer.
FeedForward make_psi_ffn();
double psi(double u);

// Delta (-h1 + h2, -h2, 0, 0, 0); with the block residual row 1 <- row 2, row 2 <- 0.
FeedForward make_replace_ffn();

// Delta (psi(scale*h2 + shift), -h2, 0, 0, 0) with psi exactly zero off its support.
FeedForward make_trapezoid_delta_ffn(double scale, double shift);

// ffn algebra on 5 -> 5 maps
FeedForward compose_ffn(const FeedForward& first, const FeedForward& second);
FeedForward carry_frame(const FeedForward& delta);
FeedForward data_projection();
FeedForward sum_ffns(const std::vector<FeedForward>& parts);
// Interval bound on |rows 1..2| of ffn output for |data| <= m, I in [0,1]^2, const 1.
double ffn_output_bound(const FeedForward& ffn, double m);
// Delta applied on tokens first..last only (1-based, inclusive), zero elsewhere.
FeedForward restrict_delta(const FeedForward& delta, std::size_t first, std::size_t last,
                           double delta_bound, std::size_t tokens);
bool reads_interaction(const FeedForward& ffn);

}  // namespace tfa
