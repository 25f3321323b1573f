// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <cstddef>

#include "tfa/runtime/matrix.hpp"

namespace tfa {

// Token layout used by every constructor: rows 1..2 carry data, rows 3..4 the
// interaction term I_t = (cos(t pi/(2l)), sin(t pi/(2l))), row 5 the constant 1.
// Token and row numbers in this module are 1-based.
struct StructuredLayout {
    static constexpr std::size_t d_embd = 5;

    std::size_t tokens = 0;
    double magnitude = 1.0;  // bound on |data entries|

    StructuredLayout() = default;
    StructuredLayout(std::size_t l, double m);

    std::array<double, 2> interaction(std::size_t t) const;
    // d_embd x l positional encoding with zero data rows
    Matrix positional() const;
    StructuredLayout with_bound(double m) const { return StructuredLayout(tokens, m); }
};

struct DataKernelPair {
    Matrix QB;  // 2 x 5
    Matrix KB;  // 2 x 5
    double kappa = 1.0;

    DataKernelPair() : QB(2, 5), KB(2, 5) {}
    DataKernelPair(Matrix q, Matrix k, double kappa_bound);
    static DataKernelPair fitted(Matrix q, Matrix k);  // kappa = max |entry| (at least 1e-300)
};

// e_r^T as a 5-vector row, r 1-based
std::array<double, 5> unit_row(std::size_t r, double scale = 1.0);

}  // namespace tfa
