// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/simd/kernels.hpp"

#include <vector>

namespace tfa::simd {
namespace {

void combine_rows_scalar(const double* w, const double* const* rows, std::size_t nrows,
                         std::size_t n, double bias, bool use_relu, double* out) {
    for (std::size_t t = 0; t < n; ++t) {
        double acc = nrows ? w[0] * rows[0][t] : 0.0;
        for (std::size_t c = 1; c < nrows; ++c)
            acc = acc + w[c] * rows[c][t];
        acc = acc + bias;
        out[t] = use_relu ? relu(acc) : acc;
    }
}

void attention_scalar(const double* qh, const double* kh, const double* vh, std::size_t d,
                      std::size_t l, double* out) {
    std::vector<double> acc(d);
    for (std::size_t t = 0; t < l; ++t) {
        for (std::size_t r = 0; r < d; ++r)
            acc[r] = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            double s = qh[t] * kh[k];
            for (std::size_t c = 1; c < d; ++c)
                s = s + qh[c * l + t] * kh[c * l + k];
            s = relu(s);
            for (std::size_t r = 0; r < d; ++r)
                acc[r] = acc[r] + s * vh[r * l + k];
        }
        for (std::size_t r = 0; r < d; ++r)
            out[r * l + t] = acc[r];
    }
}

void squared_distances_scalar(const double* q, const double* const* coords, std::size_t dim,
                              std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double diff = coords[j][i] - q[j];
            acc = acc + diff * diff;
        }
        out[i] = acc;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", combine_rows_scalar, attention_scalar,
                                   squared_distances_scalar};
    return table;
}

}  // namespace tfa::simd
