// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "tfa/runtime/forward.hpp"
#include "tfa/simd/kernels.hpp"

using namespace tfa;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("avx2 kernels round exactly like the scalar ones") {
    const simd::KernelTable* avx = simd::avx2_kernels();
    if (!avx) {
        MESSAGE("AVX2 not available on this machine; equivalence not exercised");
        return;
    }
    const simd::KernelTable& sc = simd::scalar_kernels();
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 130u}) {
        for (std::size_t nrows : {1u, 2u, 5u}) {
            std::vector<std::vector<double>> rows;
            std::vector<const double*> ptr;
            for (std::size_t r = 0; r < nrows; ++r)
                rows.push_back(random_vec(rng, n, 1e3));
            for (auto& r : rows)
                ptr.push_back(r.data());
            const auto w = random_vec(rng, nrows, 10.0);
            for (bool relu : {false, true}) {
                std::vector<double> a(n), b(n);
                sc.combine_rows(w.data(), ptr.data(), nrows, n, 0.25, relu, a.data());
                avx->combine_rows(w.data(), ptr.data(), nrows, n, 0.25, relu, b.data());
                CHECK(bit_equal(a, b));
            }
        }
        for (std::size_t d : {1u, 2u, 5u}) {
            const auto q = random_vec(rng, d * n), k = random_vec(rng, d * n), v = random_vec(rng, d * n);
            std::vector<double> a(d * n), b(d * n);
            sc.attention(q.data(), k.data(), v.data(), d, n, a.data());
            avx->attention(q.data(), k.data(), v.data(), d, n, b.data());
            CHECK(bit_equal(a, b));
        }
        for (std::size_t dim : {1u, 3u, 20u}) {
            std::vector<std::vector<double>> coords;
            std::vector<const double*> ptr;
            for (std::size_t j = 0; j < dim; ++j)
                coords.push_back(random_vec(rng, n));
            for (auto& c : coords)
                ptr.push_back(c.data());
            const auto q = random_vec(rng, dim);
            std::vector<double> a(n), b(n);
            sc.squared_distances(q.data(), ptr.data(), dim, n, a.data());
            avx->squared_distances(q.data(), ptr.data(), dim, n, b.data());
            CHECK(bit_equal(a, b));
        }
    }
}

TEST_CASE("relu propagates NaN and clears negatives") {
    CHECK(simd::relu(-1.0) == 0.0);
    CHECK(simd::relu(2.5) == 2.5);
    CHECK(std::isnan(simd::relu(std::nan(""))));
}

TEST_CASE("forced variants switch the active table") {
    simd::force_variant(simd::Variant::scalar);
    CHECK(&simd::active() == &simd::scalar_kernels());
    simd::force_variant(simd::Variant::automatic);
    if (simd::avx2_kernels())
        CHECK(&simd::active() == simd::avx2_kernels());
    else
        CHECK(&simd::active() == &simd::scalar_kernels());
}

TEST_CASE("dense forward is bit-identical under both kernel tables") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    auto rnd = [&](std::size_t r, std::size_t c) {
        Matrix m(r, c);
        for (auto& x : m.data())
            x = u(rng);
        return m;
    };
    TransformerBlock b;
    for (int h = 0; h < 3; ++h)
        b.heads.push_back({rnd(5, 5), rnd(5, 5), rnd(5, 5), std::nullopt, 0.0});
    b.ffn.layers = {{rnd(7, 5), std::vector<double>(7, 0.1)}, {rnd(5, 7), std::vector<double>(5, -0.2)}};
    const Matrix H = rnd(5, 37);
    simd::force_variant(simd::Variant::scalar);
    const Matrix a = block_forward(b, H);
    simd::force_variant(simd::Variant::automatic);
    const Matrix c = block_forward(b, H);
    CHECK(a == c);
}
