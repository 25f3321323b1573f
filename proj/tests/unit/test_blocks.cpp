// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "tfa/blocks/block_spec.hpp"
#include "tfa/blocks/builders.hpp"
#include "tfa/error.hpp"
#include "tfa/runtime/forward.hpp"

using namespace tfa;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
std::mt19937_64 rng(77);

Matrix structured(const StructuredLayout& L, double m) {
    std::uniform_real_distribution<double> u(-m, m);
    Matrix H = L.positional();
    for (std::size_t t = 0; t < L.tokens; ++t) {
        H(0, t) = u(rng);
        H(1, t) = u(rng);
    }
    return H;
}

DataKernelPair random_kernels(double kappa) {
    std::uniform_real_distribution<double> u(-kappa, kappa);
    Matrix q(2, 5), k(2, 5);
    for (auto& v : q.data())
        v = u(rng);
    for (auto& v : k.data())
        v = u(rng);
    return DataKernelPair(q, k, kappa);
}

double kernel_score(const DataKernelPair& kp, const Matrix& H, std::size_t t1, std::size_t t2) {
    double s = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < 5; ++c) {
            a += kp.QB(r, c) * H(c, t1 - 1);
            b += kp.KB(r, c) * H(c, t2 - 1);
        }
        s += a * b;
    }
    return s < 0 ? 0 : s;
}

Matrix run(const TransformerBlock& b, const Matrix& H) { return block_forward(b, H); }

}  // namespace

TEST_CASE("structured layout") {
    const StructuredLayout L(16, 2.0);
    const Matrix P = L.positional();
    for (std::size_t t = 1; t <= 16; ++t) {
        const auto I = L.interaction(t);
        CHECK(std::fabs(std::hypot(I[0], I[1]) - 1.0) <= 1e-12);
        CHECK(P(4, t - 1) == 1.0);
        CHECK(P(0, t - 1) == 0.0);
        CHECK(I[0] == doctest::Approx(std::cos(double(t) * M_PI / 32.0)));
    }
}

TEST_CASE("interaction head") {
    SUBCASE("zero query kernel") {
        const StructuredLayout L(6, 1.0);
        const auto ih = make_interaction_head(2, 4, 1, DataKernelPair(Matrix(2, 5), Matrix(2, 5), 1.0), L);
        CHECK(attention_forward(ih.head, structured(L, 1.0)).is_zero());
    }
    SUBCASE("copy the first data entry of token 3 to token 1") {
        const StructuredLayout L(4, 1.0);
        Matrix q(2, 5), k(2, 5);
        q(0, 4) = 1.0;
        k(0, 0) = 1.0;
        const auto ih = make_interaction_head(1, 3, 2, DataKernelPair::fitted(q, k), L);
        Matrix H = structured(L, 1.0);
        H(0, 2) = 0.625;
        const Matrix A = attention_forward(ih.head, H);
        CHECK(std::fabs(A(1, 0) - 0.625) <= 10.0 * ih.C * eps);
        for (std::size_t t = 1; t < 4; ++t)
            for (std::size_t r = 0; r < 5; ++r)
                CHECK(A(r, t) == 0.0);
        for (std::size_t r : {0u, 2u, 3u, 4u})
            CHECK(A(r, 0) == 0.0);
    }
    SUBCASE("random kernels, l = 16: exact off-target zeros and weight bound") {
        for (int trial = 0; trial < 50; ++trial) {
            const StructuredLayout L(16, 1.0);
            std::uniform_int_distribution<std::size_t> tok(1, 16), row(1, 5);
            const std::size_t t1 = tok(rng), t2 = tok(rng), out = row(rng);
            const auto kp = random_kernels(1.0);
            const auto ih = make_interaction_head(t1, t2, out, kp, L);
            const Matrix H = structured(L, 1.0);
            const Matrix A = attention_forward(ih.head, H);
            for (std::size_t t = 0; t < 16; ++t)
                for (std::size_t r = 0; r < 5; ++r)
                    if (t != t1 - 1 || r != out - 1)
                        REQUIRE(A(r, t) == 0.0);
            CHECK(std::fabs(A(out - 1, t1 - 1) - kernel_score(kp, H, t1, t2)) <= 10.0 * ih.C * eps);
            const double bound = 2.0 * 625.0 * 256.0 / (1.0 - std::cos(M_PI / 32.0)) + 1.0;
            CHECK(std::max({ih.head.Q.max_abs(), ih.head.K.max_abs(), ih.head.V.max_abs()}) <= bound);
        }
    }
    SUBCASE("parameter errors") {
        CHECK_THROWS_AS(make_interaction_head(0, 1, 1, random_kernels(1.0), StructuredLayout(4, 1.0)), Error);
        CHECK_THROWS_AS(make_interaction_head(1, 5, 1, random_kernels(1.0), StructuredLayout(4, 1.0)), Error);
        CHECK_THROWS_AS(interaction_constant(1.0, 1.0, 0), Error);
    }
}

TEST_CASE("gating ffn") {
    SUBCASE("l = 2, keep prefix") {
        const StructuredLayout L(2, 1.0);
        const FeedForward g = make_gating_ffn(1, KeepSide::prefix, L);
        CHECK(g.depth() == 2);
        Matrix H = structured(L, 1.0);
        const Matrix out = ffn_forward(g, H);
        CHECK(std::fabs(out(0, 0) - H(0, 0)) <= 1e-12);
        CHECK(std::fabs(out(1, 0) - H(1, 0)) <= 1e-12);
        CHECK(out(0, 1) == 0.0);
        CHECK(out(1, 1) == 0.0);
        for (std::size_t r = 2; r < 5; ++r)
            CHECK(std::fabs(out(r, 1) - H(r, 1)) <= 1e-12);
    }
    SUBCASE("zero data is a fixed point") {
        const StructuredLayout L(8, 1.0);
        const Matrix H = L.positional();
        for (auto side : {KeepSide::prefix, KeepSide::suffix}) {
            const Matrix out = ffn_forward(make_gating_ffn(3, side, L), H);
            for (std::size_t i = 0; i < H.data().size(); ++i)
                CHECK(std::fabs(out.data()[i] - H.data()[i]) <= 1e-12);
        }
    }
    SUBCASE("l = 64, M = 3, both sides, idempotent") {
        const StructuredLayout L(64, 3.0);
        for (auto side : {KeepSide::prefix, KeepSide::suffix}) {
            const std::size_t k = 23;
            const FeedForward g = make_gating_ffn(k, side, L);
            const Matrix H = structured(L, 3.0);
            const Matrix out = ffn_forward(g, H);
            for (std::size_t t = 1; t <= 64; ++t) {
                const bool kept = side == KeepSide::prefix ? t <= k : t > k;
                for (std::size_t r = 0; r < 2; ++r) {
                    if (kept)
                        CHECK(std::fabs(out(r, t - 1) - H(r, t - 1)) <= 1e-12);
                    else
                        CHECK(out(r, t - 1) == 0.0);
                }
            }
            const Matrix twice = ffn_forward(g, out);
            for (std::size_t t = 0; t < 64; ++t)
                for (std::size_t r = 0; r < 2; ++r)
                    CHECK(std::fabs(twice(r, t) - out(r, t)) <= 1e-12);
        }
        CHECK(gating_constant(L) >= 16.0 * 64.0 * 3.0 / M_PI);
    }
    SUBCASE("one token has no pivot") {
        CHECK_THROWS_AS(make_gating_ffn(1, KeepSide::prefix, StructuredLayout(1, 1.0)), Error);
    }
}

TEST_CASE("psi") {
    CHECK(psi(0.0) == 1.0);
    CHECK(psi(1.5) == 0.5);
    CHECK(psi(3.0) == 0.0);
    CHECK(psi(-3.0) == 0.0);
    const FeedForward f = make_psi_ffn();
    std::uniform_real_distribution<double> u(-4, 4);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng);
        const auto out = ffn_apply(f, std::vector<double>{x, 0, 0, 0, 1});
        const double closed = std::max(0.0, std::min(1.0, 2.0 - std::fabs(x)));
        worst = std::max(worst, std::fabs(out[0] - closed));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("addition block") {
    const StructuredLayout L(4, 2.0);
    auto embed_x = [&](std::vector<double> x) {
        Matrix H = L.positional();
        for (std::size_t i = 0; i < x.size(); ++i)
            H(0, i) = x[i];
        return H;
    };
    const Matrix H = embed_x({0.3, 0.7});
    SUBCASE("zero shift copies") {
        const auto b = make_addition_block({0.0, 0.0}, L);
        const Matrix out = run(b.block, H);
        CHECK(std::fabs(out(0, 2) - 0.3) <= 10.0 * b.cancellation * eps);
        CHECK(std::fabs(out(0, 3) - 0.7) <= 10.0 * b.cancellation * eps);
        CHECK(out(0, 0) == 0.3);
    }
    SUBCASE("hand case") {
        const auto b = make_addition_block({0.1, -0.2}, L);
        const Matrix out = run(b.block, H);
        CHECK(std::fabs(out(0, 2) - 0.2) <= 10.0 * b.cancellation * eps);
        CHECK(std::fabs(out(0, 3) - 0.9) <= 10.0 * b.cancellation * eps);
        CHECK(out(1, 2) == 0.0);
    }
    SUBCASE("inverse composition through a fresh layout") {
        const std::vector<double> c{0.4, -0.9};
        const auto fwd = make_addition_block(c, L);
        const Matrix shifted = run(fwd.block, H);
        // copy x - c into a new layout's input slots and add c back
        Matrix H2 = L.positional();
        H2(0, 0) = shifted(0, 2);
        H2(0, 1) = shifted(0, 3);
        const auto inv = make_addition_block({-0.4, 0.9}, L);
        const Matrix back = run(inv.block, H2);
        const double tol = 10.0 * std::max(fwd.cancellation, inv.cancellation) * eps;
        CHECK(std::fabs(back(0, 2) - 0.3) <= tol);
        CHECK(std::fabs(back(0, 3) - 0.7) <= tol);
    }
    SUBCASE("shift beyond M/2") {
        CHECK_THROWS_AS(make_addition_block({1.5, 0.0}, L), Error);
    }
}

TEST_CASE("replace ffn") {
    const FeedForward f = make_replace_ffn();
    auto apply = [&](double a, double b) {
        const std::vector<double> h{a, b, 0.3, 0.4, 1.0};
        auto d = ffn_apply(f, h);
        for (std::size_t i = 0; i < 5; ++i)
            d[i] += h[i];
        return d;
    };
    auto r = apply(2.0, -3.0);
    CHECK(r[0] == -3.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == 0.3);
    CHECK(r[4] == 1.0);
    r = apply(1.25, 1.25);
    CHECK(r[0] == 1.25);
    CHECK(r[1] == 0.0);
    r = apply(0.5, 0.0);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(f.depth() == 1);
}

TEST_CASE("parallelization") {
    auto copy_spec = [](std::size_t to, std::size_t from) {
        BlockSpec s;
        s.tokens = 4;
        s.data_bound = 1.0;
        s.provenance = "copy";
        Matrix q(2, 5), k(2, 5);
        q(0, 4) = 1.0;
        k(0, 0) = 1.0;
        s.heads.push_back({to, from, 2, DataKernelPair::fitted(q, k), 1.0});
        return s;
    };
    auto data_rows = [](const Matrix& H, std::size_t first, std::size_t count) {
        std::vector<double> v;
        for (std::size_t t = first; t < first + count; ++t) {
            v.push_back(H(0, t));
            v.push_back(H(1, t));
        }
        return v;
    };
    auto close = [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::fabs(a[i] - b[i]) > tol)
                return false;
        return true;
    };

    SUBCASE("empty partner") {
        const BlockSpec a = copy_spec(1, 3);
        const auto pa = materialize(a);
        const auto p = parallelize_blocks(a, empty_block(4, 1.0));
        const Matrix H = structured(StructuredLayout(8, 1.0), 1.0);
        Matrix Ha = StructuredLayout(4, 1.0).positional();
        for (std::size_t t = 0; t < 4; ++t) {
            Ha(0, t) = H(0, t);
            Ha(1, t) = H(1, t);
        }
        const Matrix out = run(p.block, H), ref = run(pa.block, Ha);
        const double tol = 10.0 * std::max(p.cancellation, pa.cancellation) * eps;
        CHECK(close(data_rows(out, 0, 4), data_rows(ref, 0, 4), tol));
        CHECK(data_rows(out, 4, 4) == data_rows(H, 4, 4));
    }
    SUBCASE("two single-head blocks match their standalone runs") {
        const BlockSpec a = copy_spec(1, 3), b = copy_spec(4, 2);
        const auto p = parallelize_blocks(a, b);
        CHECK(p.layout.tokens == 8);
        const Matrix H = structured(StructuredLayout(8, 1.0), 1.0);
        auto half = [&](std::size_t off) {
            Matrix h = StructuredLayout(4, 1.0).positional();
            for (std::size_t t = 0; t < 4; ++t) {
                h(0, t) = H(0, t + off);
                h(1, t) = H(1, t + off);
            }
            return h;
        };
        const auto ma = materialize(a), mb = materialize(b);
        const Matrix out = run(p.block, H);
        const double tol = 10.0 * std::max({p.cancellation, ma.cancellation, mb.cancellation}) * eps;
        CHECK(close(data_rows(out, 0, 4), data_rows(run(ma.block, half(0)), 0, 4), tol));
        CHECK(close(data_rows(out, 4, 4), data_rows(run(mb.block, half(4)), 0, 4), tol));
    }
    SUBCASE("associativity on data rows") {
        BlockSpec a = copy_spec(1, 3), b = copy_spec(4, 2), c = copy_spec(2, 2);
        c.ffn = FfnSpec::gated(make_replace_ffn(), 1, 2);
        const auto left = materialize(parallelize(parallelize(a, b), c));
        const auto right = materialize(parallelize(a, parallelize(b, c)));
        const Matrix H = structured(StructuredLayout(12, 1.0), 1.0);
        const double tol = 10.0 * std::max(left.cancellation, right.cancellation) * eps;
        CHECK(close(data_rows(run(left.block, H), 0, 12), data_rows(run(right.block, H), 0, 12), tol));
    }
    SUBCASE("opaque ffn is rejected") {
        BlockSpec a = copy_spec(1, 3);
        a.ffn = FfnSpec::opaque(make_psi_ffn());
        try {
            parallelize(a, copy_spec(1, 2));
            FAIL("expected unsupported block");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::unsupported_block);
        }
    }
}
