// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
// Built with -mavx2 and without FMA contraction so every lane performs the
// same multiply/add sequence as the scalar kernels.

#include <immintrin.h>

#include <vector>

#include "tfa/simd/kernels.hpp"

namespace tfa::simd {
namespace {

void combine_rows_avx2(const double* w, const double* const* rows, std::size_t nrows,
                       std::size_t n, double bias, bool use_relu, double* out) {
    const __m256d vb = _mm256_set1_pd(bias);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t t = 0;
    if (nrows) {
        for (; t + 4 <= n; t += 4) {
            __m256d acc = _mm256_mul_pd(_mm256_set1_pd(w[0]), _mm256_loadu_pd(rows[0] + t));
            for (std::size_t c = 1; c < nrows; ++c)
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[c]), _mm256_loadu_pd(rows[c] + t)));
            acc = _mm256_add_pd(acc, vb);
            if (use_relu)
                acc = _mm256_max_pd(zero, acc);
            _mm256_storeu_pd(out + t, acc);
        }
    }
    for (; t < n; ++t) {
        double acc = nrows ? w[0] * rows[0][t] : 0.0;
        for (std::size_t c = 1; c < nrows; ++c)
            acc = acc + w[c] * rows[c][t];
        acc = acc + bias;
        out[t] = use_relu ? relu(acc) : acc;
    }
}

// Four queries per pass; scores and sums run over keys in ascending order per lane.
void attention_avx2(const double* qh, const double* kh, const double* vh, std::size_t d,
                    std::size_t l, double* out) {
    constexpr std::size_t kMaxRows = 16;
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc[kMaxRows];
    std::size_t t = 0;
    for (; d <= kMaxRows && t + 4 <= l; t += 4) {
        for (std::size_t r = 0; r < d; ++r)
            acc[r] = _mm256_setzero_pd();
        for (std::size_t k = 0; k < l; ++k) {
            __m256d s = _mm256_mul_pd(_mm256_loadu_pd(qh + t), _mm256_set1_pd(kh[k]));
            for (std::size_t c = 1; c < d; ++c)
                s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(qh + c * l + t), _mm256_set1_pd(kh[c * l + k])));
            s = _mm256_max_pd(zero, s);
            for (std::size_t r = 0; r < d; ++r)
                acc[r] = _mm256_add_pd(acc[r], _mm256_mul_pd(s, _mm256_set1_pd(vh[r * l + k])));
        }
        for (std::size_t r = 0; r < d; ++r)
            _mm256_storeu_pd(out + r * l + t, acc[r]);
    }
    std::vector<double> tail(d);
    for (; t < l; ++t) {
        for (std::size_t r = 0; r < d; ++r)
            tail[r] = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            double s = qh[t] * kh[k];
            for (std::size_t c = 1; c < d; ++c)
                s = s + qh[c * l + t] * kh[c * l + k];
            s = relu(s);
            for (std::size_t r = 0; r < d; ++r)
                tail[r] = tail[r] + s * vh[r * l + k];
        }
        for (std::size_t r = 0; r < d; ++r)
            out[r * l + t] = tail[r];
    }
}

void squared_distances_avx2(const double* q, const double* const* coords, std::size_t dim,
                            std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < dim; ++j) {
            __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(coords[j] + i), _mm256_set1_pd(q[j]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double diff = coords[j][i] - q[j];
            acc = acc + diff * diff;
        }
        out[i] = acc;
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", combine_rows_avx2, attention_avx2, squared_distances_avx2};
    return table;
}

}  // namespace tfa::simd
