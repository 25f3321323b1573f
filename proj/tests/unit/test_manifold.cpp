// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tfa/error.hpp"
#include "tfa/runtime/compiled.hpp"
#include "tfa/runtime/forward.hpp"
#include "tfa/synthesis/manifold.hpp"

using namespace tfa;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

double run_indicator(const Chart& ch, double delta, std::size_t D, double Mx, const std::vector<double>& x,
                     double& C) {
    const auto blocks = synthesize_indicator_net(ch, delta, D, Mx);
    EmbeddingMatrix H = StructuredLayout(2 * D + 1, 1.0).positional();
    for (std::size_t j = 0; j < D; ++j)
        H(0, j) = x[j];
    C = 0.0;
    for (const auto& b : blocks) {
        H = block_forward(b.block, H);
        C = std::max(C, b.cancellation);
    }
    return H(0, 2 * D);
}

Chart random_chart(std::size_t D, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Chart ch;
    ch.center.resize(D);
    for (auto& v : ch.center)
        v = 0.3 * g(rng);
    ch.basis = Matrix(D, d);
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> v(D);
        for (auto& e : v)
            e = g(rng);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < k; ++p) {
                double dot = 0.0;
                for (std::size_t i = 0; i < D; ++i)
                    dot += v[i] * ch.basis(i, p);
                for (std::size_t i = 0; i < D; ++i)
                    v[i] -= dot * ch.basis(i, p);
            }
        double n = 0.0;
        for (double e : v)
            n += e * e;
        for (std::size_t i = 0; i < D; ++i)
            ch.basis(i, k) = v[i] / std::sqrt(n);
    }
    ch.radius = 0.5;
    ch.scale = 0.8;
    ch.offset.assign(d, 0.5);
    return ch;
}

}  // namespace

TEST_CASE("atlas construction") {
    SUBCASE("circle with 16 charts covers") {
        const Atlas a = make_atlas(ManifoldShape::circle, 16);
        CHECK(a.charts.size() == 16);
        CHECK(a.charts[0].radius == doctest::Approx(0.25));
        CHECK_NOTHROW(validate_atlas(a, 2000));
        for (const auto& x : a.validation_points(500)) {
            REQUIRE(a.bump_sum(x) > a.cover_threshold);
            for (const auto& ch : a.charts) {
                const auto y = ch.project(x);
                double dist = 0.0;
                for (std::size_t j = 0; j < 2; ++j)
                    dist += (x[j] - ch.center[j]) * (x[j] - ch.center[j]);
                if (dist <= ch.radius * ch.radius)
                    REQUIRE((y[0] >= -1e-12 && y[0] <= 1.0 + 1e-12));
            }
        }
    }
    SUBCASE("circle with 8 charts leaves gaps") {
        try {
            make_atlas(ManifoldShape::circle, 8);
            FAIL("expected coverage error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::coverage);
        }
    }
    SUBCASE("flat patch chart is a rigid change of coordinates") {
        AtlasParams p;
        p.intrinsic_dim = 2;
        p.ambient_dim = 3;
        const Atlas a = make_atlas(ManifoldShape::flat_patch, 1, p);
        REQUIRE(a.charts.size() == 1);
        const Chart& ch = a.charts[0];
        const auto pts = a.sample(50, 4);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const auto y0 = ch.project(pts[i - 1]), y1 = ch.project(pts[i]);
            double dy = 0.0, dx = 0.0;
            for (std::size_t k = 0; k < 2; ++k)
                dy += (y0[k] - y1[k]) * (y0[k] - y1[k]);
            for (std::size_t k = 0; k < 3; ++k)
                dx += (pts[i - 1][k] - pts[i][k]) * (pts[i - 1][k] - pts[i][k]);
            CHECK(std::sqrt(dy) == doctest::Approx(ch.scale * std::sqrt(dx)).epsilon(1e-10));
        }
    }
}

TEST_CASE("chart projection block") {
    SUBCASE("center maps to the scaled offset") {
        const Atlas a = make_atlas(ManifoldShape::circle, 16);
        const Chart& ch = a.charts[3];
        double C = 0.0;
        const double err = chart_projection_error(ch, 2, a.ambient_bound, {ch.center}, &C);
        CHECK(err <= 10.0 * C * eps);
        const auto y = ch.project(ch.center);
        CHECK(y[0] == doctest::Approx(ch.scale * ch.offset[0]));
    }
    SUBCASE("circle chart at (1, 0)") {
        const Atlas a = make_atlas(ManifoldShape::circle, 16);
        const Chart& ch = a.charts[0];
        REQUIRE(std::fabs(ch.center[0] - 1.0) < 1e-12);
        std::vector<std::vector<double>> pts;
        for (double th : {-0.2, -0.05, 0.0, 0.1, 0.24}) {
            const std::vector<double> x{std::cos(th), std::sin(th)};
            const double v = ch.basis(1, 0);
            CHECK(ch.project(x)[0] ==
                  doctest::Approx(ch.scale * (v * std::sin(th) + ch.basis(0, 0) * (x[0] - 1.0) + ch.offset[0])));
            pts.push_back(x);
        }
        double C = 0.0;
        const double err = chart_projection_error(ch, 2, a.ambient_bound, pts, &C);
        CHECK(err <= 10.0 * C * eps);
    }
    SUBCASE("random orthonormal basis in R^6") {
        const Chart ch = random_chart(6, 2, 21);
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<std::vector<double>> pts(100, std::vector<double>(6));
        for (auto& p : pts)
            for (auto& v : p)
                v = u(rng);
        double C = 0.0;
        const double err = chart_projection_error(ch, 6, 1.0, pts, &C);
        CHECK(C > 0.0);
        CHECK(err <= 10.0 * C * eps);
    }
}

TEST_CASE("indicator net") {
    const Atlas a = make_atlas(ManifoldShape::circle, 16);
    const Chart& ch = a.charts[5];
    const double r2 = ch.radius * ch.radius, delta = 0.01;
    double C = 0.0;
    CHECK(std::fabs(run_indicator(ch, delta, 2, a.ambient_bound, ch.center, C) - 1.0) <= 10.0 * C * eps);
    std::vector<double> mid = ch.center;
    mid[0] += std::sqrt(r2 - delta / 2.0);
    CHECK(std::fabs(run_indicator(ch, delta, 2, a.ambient_bound, mid, C) - 0.5) <= 1e-9);
    std::vector<double> far = ch.center;
    far[1] += 2.0 * ch.radius;
    CHECK(run_indicator(ch, delta, 2, a.ambient_bound, far, C) == 0.0);
    CHECK(indicator(0.0, r2, delta) == 1.0);
    CHECK(indicator(r2, r2, delta) == 0.0);
    CHECK_THROWS_AS(synthesize_indicator_net(ch, r2 * 2.0, 2, a.ambient_bound), Error);
}

TEST_CASE("manifold approximator") {
    const Atlas a = make_atlas(ManifoldShape::circle, 16);
    SUBCASE("zero target") {
        const auto m = build_manifold_model(a, make_target("constant", 2, {{"value", 0.0}}), 0.5);
        const auto mn = synthesize_manifold_approximator(m);
        const CompiledNet cn(mn.net);
        for (const auto& x : a.sample(200, 3))
            REQUIRE(std::fabs(cn.evaluate(x)) <= 10.0 * mn.net.cancellation_scale * eps);
    }
    SUBCASE("first coordinate, loose accuracy") {
        const double target_eps = 0.3;
        const auto f = make_target("linear", 2, {{"domain", {-1.0, 1.0}}});
        const auto m = build_manifold_model(a, f, target_eps);
        const auto mn = synthesize_manifold_approximator(m);
        CHECK(mn.net.blocks.size() == 7);
        const CompiledNet cn(mn.net);
        const double tol = std::max(1e-9, 10.0 * mn.net.cancellation_scale * eps);
        double worst = 0.0;
        for (const auto& x : a.sample(300, 8)) {
            const double y = cn.evaluate(x);
            REQUIRE(std::fabs(y - manifold_oracle(m, x)) <= tol);
            worst = std::max(worst, std::fabs(y - x[0]));
        }
        CHECK(worst <= target_eps);
    }
    SUBCASE("indicator suppression") {
        const auto f = make_target("constant", 2, {{"value", 1.0}});
        const auto m = build_manifold_model(a, f, 0.5);
        const auto mn = synthesize_manifold_approximator(m);
        TransformerNet head_part = mn.net;
        head_part.blocks.resize(mn.indicator_block + 1);
        const CompiledNet cn(head_part);
        const auto& L = mn.layout;
        const auto x = a.sample(1, 11)[0];
        const EmbeddingMatrix H = cn.hidden(x);
        for (std::size_t c = 0; c < L.charts; ++c) {
            double dist = 0.0;
            for (std::size_t j = 0; j < 2; ++j)
                dist += (x[j] - a.charts[c].center[j]) * (x[j] - a.charts[c].center[j]);
            if (dist >= a.charts[c].radius * a.charts[c].radius)
                CHECK(H(0, L.indicator_token(c) - 1) == 0.0);
        }
    }
}
