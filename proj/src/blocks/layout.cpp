// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/blocks/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tfa/error.hpp"

namespace tfa {

StructuredLayout::StructuredLayout(std::size_t l, double m) : tokens(l), magnitude(m) {
    if (l == 0)
        fail(ErrorKind::parameter, "layout needs at least one token");
    if (!(m > 0.0) || !std::isfinite(m))
        fail(ErrorKind::parameter, "magnitude bound must be positive");
}

std::array<double, 2> StructuredLayout::interaction(std::size_t t) const {
    const double ang = double(t) * std::numbers::pi / (2.0 * double(tokens));
    return {std::cos(ang), std::sin(ang)};
}

Matrix StructuredLayout::positional() const {
    Matrix p(d_embd, tokens);
    for (std::size_t t = 1; t <= tokens; ++t) {
        auto I = interaction(t);
        p(2, t - 1) = I[0];
        p(3, t - 1) = I[1];
        p(4, t - 1) = 1.0;
    }
    return p;
}

DataKernelPair::DataKernelPair(Matrix q, Matrix k, double kappa_bound)
    : QB(std::move(q)), KB(std::move(k)), kappa(kappa_bound) {
    if (QB.rows() != 2 || QB.cols() != 5 || KB.rows() != 2 || KB.cols() != 5)
        fail(ErrorKind::dimension, "data kernels must be 2x5");
    if (!(kappa > 0.0))
        fail(ErrorKind::parameter, "kernel bound must be positive");
    if (std::max(QB.max_abs(), KB.max_abs()) > kappa)
        fail(ErrorKind::bound, "kernel entry exceeds its bound");
}

DataKernelPair DataKernelPair::fitted(Matrix q, Matrix k) {
    double kappa = std::max({q.max_abs(), k.max_abs(), 1e-300});
    return DataKernelPair(std::move(q), std::move(k), kappa);
}

std::array<double, 5> unit_row(std::size_t r, double scale) {
    std::array<double, 5> v{};
    v[r - 1] = scale;
    return v;
}

}  // namespace tfa
