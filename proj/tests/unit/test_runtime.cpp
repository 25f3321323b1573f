// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "tfa/error.hpp"
#include "tfa/runtime/forward.hpp"
#include "tfa/runtime/net.hpp"
#include "tfa/runtime/serialize.hpp"

using namespace tfa;

namespace {

std::mt19937_64 rng(2026);

Matrix rnd(std::size_t r, std::size_t c, double s = 1.0) {
    std::uniform_real_distribution<double> u(-s, s);
    Matrix m(r, c);
    for (auto& x : m.data())
        x = u(rng);
    return m;
}

AttentionHead rnd_head(std::size_t d) { return {rnd(d, d), rnd(d, d), rnd(d, d), std::nullopt, 0.0}; }

// column t = sum_k relu(<Q h_t, K h_k>) V h_k, straight from the definition
Matrix triple_loop(const AttentionHead& a, const Matrix& H) {
    const std::size_t d = H.rows(), l = H.cols();
    auto apply = [&](const Matrix& M, std::size_t t) {
        std::vector<double> v(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                v[i] += M(i, j) * H(j, t);
        return v;
    };
    Matrix out(d, l);
    for (std::size_t t = 0; t < l; ++t) {
        const auto q = apply(a.Q, t);
        for (std::size_t k = 0; k < l; ++k) {
            const auto kk = apply(a.K, k), vv = apply(a.V, k);
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                s += q[i] * kk[i];
            s = s < 0 ? 0 : s;
            for (std::size_t i = 0; i < d; ++i)
                out(i, t) += s * vv[i];
        }
    }
    return out;
}

double max_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

TransformerNet passthrough(std::size_t D, std::size_t l, double R) {
    TransformerNet n;
    n.input_dim = D;
    n.token_count = l;
    n.embed_dim = 5;
    n.input_map = Matrix(l, D);
    n.input_map(l - 1, 0) = 1.0;
    n.column_lift = {1, 0, 0, 0, 0};
    n.positional = Matrix(5, l);
    n.output_clip = R;
    return n;
}

}  // namespace

TEST_CASE("attention_forward") {
    SUBCASE("zero weights give zero") {
        AttentionHead z{Matrix(5, 5), Matrix(5, 5), Matrix(5, 5), std::nullopt, 0.0};
        CHECK(attention_forward(z, rnd(5, 4)).is_zero());
    }
    SUBCASE("scalar hand case") {
        AttentionHead h{Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, std::nullopt, 0.0};
        CHECK(attention_forward(h, Matrix{{2}})(0, 0) == 8.0);
    }
    SUBCASE("random 5x8 against the triple loop") {
        const auto h = rnd_head(5);
        const Matrix H = rnd(5, 8);
        CHECK(max_diff(attention_forward(h, H), triple_loop(h, H)) <= 1e-12);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(attention_forward(rnd_head(4), rnd(5, 3)), Error);
    }
    SUBCASE("V-linearity and input left alone") {
        auto h = rnd_head(5);
        const Matrix H = rnd(5, 6), copy = H;
        const Matrix a = attention_forward(h, H);
        for (auto& v : h.V.data())
            v *= 3.0;
        const Matrix b = attention_forward(h, H);
        for (std::size_t i = 0; i < a.data().size(); ++i)
            CHECK(b.data()[i] == doctest::Approx(3.0 * a.data()[i]).epsilon(1e-12));
        CHECK(H == copy);
    }
}

TEST_CASE("mha_forward sums heads") {
    const Matrix H = rnd(5, 6);
    const auto h = rnd_head(5);
    CHECK(mha_forward({h}, H) == attention_forward(h, H));
    const Matrix two = mha_forward({h, h}, H), one = attention_forward(h, H);
    CHECK(max_diff(two, one) > 0.0);
    for (std::size_t i = 0; i < one.data().size(); ++i)
        CHECK(two.data()[i] == 2.0 * one.data()[i]);
    std::vector<AttentionHead> three{rnd_head(5), rnd_head(5), rnd_head(5)};
    Matrix s(5, 6);
    for (const auto& x : three) {
        const Matrix a = triple_loop(x, H);
        for (std::size_t i = 0; i < s.data().size(); ++i)
            s.data()[i] += a.data()[i];
    }
    CHECK(max_diff(mha_forward(three, H), s) <= 1e-12);
    CHECK(mha_forward({}, H).is_zero());
}

TEST_CASE("ffn_forward") {
    const Matrix H = rnd(5, 4);
    FeedForward id{{{Matrix::identity(5), std::vector<double>(5, 0.0)}}};
    CHECK(ffn_forward(id, H) == H);

    Matrix pos(5, 3);
    for (auto& v : pos.data())
        v = 0.5 + std::fabs(v);
    Matrix negI = Matrix::identity(5);
    for (auto& v : negI.data())
        v = -v;
    FeedForward kill{{{negI, std::vector<double>(5, 0.0)}, {Matrix::identity(5), std::vector<double>(5, 0.0)}}};
    CHECK(ffn_forward(kill, pos).is_zero());

    FeedForward f{{{rnd(6, 5), std::vector<double>{0.1, -0.2, 0.3, 0, 0.5, -1}}, {rnd(5, 6), std::vector<double>(5, 0.25)}}};
    const Matrix out = ffn_forward(f, H);
    for (std::size_t t = 0; t < H.cols(); ++t) {
        std::vector<double> hid(6), o(5);
        for (std::size_t i = 0; i < 6; ++i) {
            double s = f.layers[0].b[i];
            for (std::size_t j = 0; j < 5; ++j)
                s += f.layers[0].W(i, j) * H(j, t);
            hid[i] = s < 0 ? 0 : s;
        }
        for (std::size_t i = 0; i < 5; ++i) {
            double s = f.layers[1].b[i];
            for (std::size_t j = 0; j < 6; ++j)
                s += f.layers[1].W(i, j) * hid[j];
            CHECK(std::fabs(out(i, t) - s) <= 1e-12);
        }
    }
    FeedForward bad{{{rnd(5, 4), std::vector<double>(5, 0.0)}}};
    CHECK_THROWS_AS(ffn_forward(bad, H), Error);
}

TEST_CASE("block_forward") {
    const Matrix H = rnd(5, 5);
    TransformerBlock empty;
    CHECK(block_forward(empty, H) == H);

    TransformerBlock c;
    std::vector<double> bias{1, 2, 3, 4, 5};
    c.ffn.layers = {{Matrix(5, 5), bias}};
    const Matrix out = block_forward(c, H);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t t = 0; t < 5; ++t)
            CHECK(out(i, t) == H(i, t) + bias[i]);

    TransformerBlock b;
    b.heads = {rnd_head(5), rnd_head(5)};
    b.ffn.layers = {{rnd(7, 5), std::vector<double>(7, 0.1)}, {rnd(5, 7), std::vector<double>(5, 0.0)}};
    Matrix X = mha_forward(b.heads, H);
    for (std::size_t i = 0; i < X.data().size(); ++i)
        X.data()[i] = X.data()[i] + H.data()[i];
    Matrix Y = ffn_forward(b.ffn, X);
    for (std::size_t i = 0; i < Y.data().size(); ++i)
        Y.data()[i] = Y.data()[i] + X.data()[i];
    CHECK(block_forward(b, H) == Y);
}

TEST_CASE("net_forward") {
    const std::vector<double> x{0.3, -0.7};
    CHECK(net_forward(passthrough(2, 3, 10.0), x) == 0.3);
    CHECK(net_forward(passthrough(2, 3, 0.0), x) == 0.0);
    CHECK(net_forward(passthrough(2, 3, 0.1), x) == 0.1);

    SUBCASE("non-finite input") {
        const std::vector<double> bad{NAN, 0.0};
        CHECK_THROWS_AS(net_forward(passthrough(2, 3, 1.0), bad), Error);
    }
    SUBCASE("overflow names the block") {
        auto n = passthrough(1, 2, 1.0);
        TransformerBlock ok, boom;
        boom.ffn.layers = {{Matrix(5, 5, 1e308), std::vector<double>(5, 1e308)}};
        n.blocks = {ok, boom};
        const std::vector<double> one{1.0};
        try {
            net_forward(n, one);
            FAIL("expected overflow");
        } catch (const OverflowError& e) {
            CHECK(e.block() == 1);
        }
    }
    SUBCASE("determinism and decoder locality") {
        auto n = passthrough(2, 4, 5.0);
        n.positional = rnd(5, 4, 0.5);
        n.blocks.push_back({{rnd_head(5)}, {{{rnd(6, 5), std::vector<double>(6, 0.0)}, {rnd(5, 6), std::vector<double>(5, 0.0)}}}, ""});
        const double a = net_forward(n, x), b = net_forward(n, x);
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
        // a stub block that perturbs everything except row 1 of the last token
        auto m = n;
        TransformerBlock stub;
        Matrix W(5, 5);
        std::vector<double> bias(5, 0.0);
        for (std::size_t i = 1; i < 5; ++i)
            bias[i] = 3.0 + double(i);
        stub.ffn.layers = {{W, bias}};
        m.blocks.push_back(stub);
        CHECK(net_forward(m, x) == net_forward(n, x));
    }
}

TEST_CASE("model_size") {
    TransformerNet n = passthrough(1, 1, 1.0);
    n.embed_dim = 5;
    TransformerBlock b;
    b.heads = {rnd_head(5), rnd_head(5)};
    for (int i = 0; i < 4; ++i)
        b.ffn.layers.push_back({rnd(5, 5), std::vector<double>(5, 0.0)});
    n.blocks = {b};
    CHECK(model_size(n).formula == 250);
    CHECK(model_size(n).learnable == 2 * 75 + 4 * 30);
    n.blocks.clear();
    CHECK(model_size(n).formula == 0);

    TransformerNet one = passthrough(1, 1, 1.0);
    one.embed_dim = 1;
    TransformerBlock h1;
    h1.heads = {{Matrix{{1}}, Matrix{{1}}, Matrix{{1}}, std::nullopt, 0.0}};
    one.blocks = {h1};
    CHECK(model_size(one).formula == 3);
    one.blocks[0].heads.push_back(one.blocks[0].heads[0]);
    CHECK(model_size(one).formula == 6);
}

TEST_CASE("serialization round trip") {
    auto n = passthrough(2, 4, 2.0);
    n.positional = rnd(5, 4);
    n.blocks.push_back({{rnd_head(5)}, {{{rnd(3, 5), std::vector<double>{1, 2, 3}}, {rnd(5, 3), std::vector<double>(5, 0.0)}}}, "x"});
    const TransformerNet back = net_from_json(net_to_json(n));
    CHECK(back.positional == n.positional);
    CHECK(back.input_map == n.input_map);
    CHECK(back.blocks.size() == 1);
    CHECK(back.blocks[0].ffn == n.blocks[0].ffn);
    const std::vector<double> x{0.1, 0.2};
    CHECK(net_forward(back, x) == net_forward(n, x));
    CHECK_THROWS_AS(net_from_json(R"({"d_embd": 5, "l": 2})"), Error);
}
