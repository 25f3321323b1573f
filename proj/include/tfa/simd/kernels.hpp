// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>

namespace tfa::simd {

// ReLU with NaN propagation; keeps the sign of a negative zero like maxpd(0, x).
inline double relu(double x) noexcept { return x < 0.0 ? 0.0 : x; }

// out[t] = relu?( sum_c w[c]*rows[c][t] (+ bias) ), terms added in ascending c.
using CombineRowsFn = void (*)(const double* w, const double* const* rows, std::size_t nrows,
                               std::size_t n, double bias, bool relu, double* out);

// out[r][t] = sum_k relu(sum_c qh[c][t]*kh[c][k]) * vh[r][k], all d x l row-major.
using AttentionFn = void (*)(const double* qh, const double* kh, const double* vh, std::size_t d,
                             std::size_t l, double* out);

// out[i] = sum_j (coords[j][i] - q[j])^2, terms added in ascending j.
using SquaredDistancesFn = void (*)(const double* q, const double* const* coords, std::size_t dim,
                                    std::size_t n, double* out);

struct KernelTable {
    const char* name;
    CombineRowsFn combine_rows;
    AttentionFn attention;
    SquaredDistancesFn squared_distances;
};

enum class Variant { automatic, scalar, avx2 };

const KernelTable& scalar_kernels();
// null when the binary or the cpu lacks AVX2
const KernelTable* avx2_kernels();

bool avx2_available();

// Active table. Forcing avx2 on a machine without it falls back to scalar.
const KernelTable& active();
void force_variant(Variant v);
Variant current_variant();

}  // namespace tfa::simd
