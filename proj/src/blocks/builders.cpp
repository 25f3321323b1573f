// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/blocks/builders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tfa/error.hpp"
#include "tfa/runtime/forward.hpp"

namespace tfa {
namespace {

constexpr std::size_t kD = 5;

void check_token(std::size_t t, std::size_t l, const char* what) {
    if (t < 1 || t > l)
        fail(ErrorKind::parameter, std::string(what) + " " + std::to_string(t) + " outside 1.." + std::to_string(l));
}

// Row whose value on token t is C(<I_target, I_t> - 1) up to rounding, and
// exactly 0 on the target with the runtime's arithmetic.
void write_gate(Matrix& m, std::size_t row, std::size_t target, double C, const StructuredLayout& layout) {
    auto I = layout.interaction(target);
    double w[kD] = {0.0, 0.0, C * I[0], C * I[1], 0.0};
    double h[kD] = {0.0, 0.0, I[0], I[1], 1.0};
    double a = dot_ordered(w, h, kD);
    for (std::size_t c = 0; c < kD; ++c)
        m(row, c) = w[c];
    m(row, 4) = -a;
}

InteractionHead build_head(std::size_t t1, const std::size_t* t2, std::size_t out_row,
                           const DataKernelPair& kernels, const StructuredLayout& layout, double sign) {
    const std::size_t l = layout.tokens;
    check_token(t1, l, "query token");
    if (t2)
        check_token(*t2, l, "key token");
    if (out_row < 1 || out_row > kD)
        fail(ErrorKind::parameter, "output row must be in 1..5");
    if (kernels.QB.rows() != 2 || kernels.QB.cols() != kD || kernels.KB.rows() != 2 || kernels.KB.cols() != kD)
        fail(ErrorKind::dimension, "data kernels must be 2x5");
    InteractionHead out;
    out.C = interaction_constant(kernels.kappa, layout.magnitude, l);
    AttentionHead& h = out.head;
    h.Q = Matrix(kD, kD);
    h.K = Matrix(kD, kD);
    h.V = Matrix(kD, kD);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < kD; ++c) {
            h.Q(r, c) = kernels.QB(r, c);
            h.K(r, c) = kernels.KB(r, c);
        }
    write_gate(h.Q, 2, t1, out.C, layout);
    h.K(2, 4) = 1.0;
    if (t2) {
        h.Q(3, 4) = 1.0;
        write_gate(h.K, 3, *t2, out.C, layout);
    }
    h.V(out_row - 1, 4) = sign;
    HeadGate g;
    g.query = t1 - 1;
    if (t2)
        g.key = *t2 - 1;
    h.gate = g;
    h.cancellation = out.C;
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double v = a(i, k);
            if (v == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += v * b(k, j);
        }
    return c;
}

FfnLayer identity_layer(std::size_t n) { return {Matrix::identity(n), std::vector<double>(n, 0.0)}; }

// depth >= 2 version of the same map
FeedForward split_linear(const FeedForward& f) {
    const FfnLayer& L = f.layers[0];
    const std::size_t o = L.W.rows(), i = L.W.cols();
    FfnLayer a{Matrix(2 * o, i), std::vector<double>(2 * o)};
    FfnLayer b{Matrix(o, 2 * o), std::vector<double>(o, 0.0)};
    for (std::size_t r = 0; r < o; ++r) {
        for (std::size_t c = 0; c < i; ++c) {
            a.W(r, c) = L.W(r, c);
            a.W(o + r, c) = -L.W(r, c);
        }
        a.b[r] = L.b[r];
        a.b[o + r] = -L.b[r];
        b.W(r, r) = 1.0;
        b.W(r, o + r) = -1.0;
    }
    return FeedForward{{std::move(a), std::move(b)}};
}

FeedForward pad_depth(FeedForward f, std::size_t depth) {
    if (f.depth() == 1 && depth > 1)
        f = split_linear(f);
    while (f.depth() < depth) {
        std::size_t w = f.layers[f.depth() - 2].W.rows();
        f.layers.insert(f.layers.end() - 1, identity_layer(w));
    }
    return f;
}

}  // namespace

double interaction_constant(double kappa, double magnitude, std::size_t l) {
    if (!(kappa > 0.0) || !(magnitude > 0.0) || l == 0)
        fail(ErrorKind::parameter, "interaction constant needs positive kappa, M and l");
    const double m = std::max(magnitude, 1.0);
    const double half = std::numbers::pi / (4.0 * double(l));
    const double gap = 2.0 * std::sin(half) * std::sin(half);  // 1 - cos(pi/(2l))
    return 2.0 * 625.0 * kappa * kappa * m * m / gap + 1.0;
}

InteractionHead make_interaction_head(std::size_t t1, std::size_t t2, std::size_t out_row,
                                      const DataKernelPair& kernels, const StructuredLayout& layout,
                                      double sign) {
    return build_head(t1, &t2, out_row, kernels, layout, sign);
}

InteractionHead make_query_head(std::size_t t1, std::size_t out_row, const DataKernelPair& kernels,
                                const StructuredLayout& layout, double sign) {
    return build_head(t1, nullptr, out_row, kernels, layout, sign);
}

double gating_constant(const StructuredLayout& layout) {
    return 16.0 * double(layout.tokens) * layout.magnitude / std::numbers::pi;
}

FeedForward make_gating_ffn(std::size_t k, KeepSide side, const StructuredLayout& layout) {
    const std::size_t l = layout.tokens;
    if (l < 2)
        fail(ErrorKind::parameter, "gating needs at least two tokens");
    if (k < 1 || k >= l)
        fail(ErrorKind::parameter, "gating pivot must be in 1..l-1");
    auto a = layout.interaction(k), b = layout.interaction(k + 1);
    double nx = a[0] + b[0], ny = a[1] + b[1];
    const double nn = std::hypot(nx, ny);
    nx /= nn;
    ny /= nn;
    // quarter turn clockwise: positive on tokens before the pivot
    double vx = ny, vy = -nx;
    if (side == KeepSide::suffix) {
        vx = -vx;
        vy = -vy;
    }
    const double C = gating_constant(layout);
    FfnLayer l1{Matrix(6, kD), std::vector<double>(6, 0.0)};
    for (std::size_t r = 0; r < 3; ++r) {
        l1.W(r, 2) = C * vx;
        l1.W(r, 3) = C * vy;
    }
    l1.W(0, 0) = 1.0;
    l1.W(1, 1) = 1.0;
    l1.W(3, 2) = 1.0;
    l1.W(4, 3) = 1.0;
    l1.W(5, 4) = 1.0;
    FfnLayer l2{Matrix(kD, 6), std::vector<double>(kD, 0.0)};
    l2.W(0, 0) = 1.0;
    l2.W(0, 2) = -1.0;
    l2.W(1, 1) = 1.0;
    l2.W(1, 2) = -1.0;
    l2.W(2, 3) = 1.0;
    l2.W(3, 4) = 1.0;
    l2.W(4, 5) = 1.0;
    return FeedForward{{std::move(l1), std::move(l2)}};
}

double psi(double u) {
    const double a = std::fabs(u);
    if (a <= 1.0)
        return 1.0;
    if (a >= 2.0)
        return 0.0;
    return 2.0 - a;
}

FeedForward make_psi_ffn() {
    FfnLayer l1{Matrix(4, kD), {2.0, 1.0, -1.0, -2.0}};
    for (std::size_t r = 0; r < 4; ++r)
        l1.W(r, 0) = 1.0;
    FfnLayer l2{Matrix(kD, 4), std::vector<double>(kD, 0.0)};
    l2.W(0, 0) = 1.0;
    l2.W(0, 1) = -1.0;
    l2.W(0, 2) = -1.0;
    l2.W(0, 3) = 1.0;
    return FeedForward{{std::move(l1), std::move(l2)}};
}

FeedForward make_replace_ffn() {
    FfnLayer l{Matrix(kD, kD), std::vector<double>(kD, 0.0)};
    l.W(0, 0) = -1.0;
    l.W(0, 1) = 1.0;
    l.W(1, 1) = -1.0;
    return FeedForward{{std::move(l)}};
}

FeedForward make_trapezoid_delta_ffn(double scale, double shift) {
    FfnLayer l1{Matrix(4, kD), {shift, -shift, 0.0, 0.0}};
    l1.W(0, 1) = scale;
    l1.W(1, 1) = -scale;
    l1.W(2, 1) = 1.0;
    l1.W(3, 1) = -1.0;
    FfnLayer l2{Matrix(4, 4), {2.0, 1.0, 0.0, 0.0}};
    l2.W(0, 0) = -1.0;
    l2.W(0, 1) = -1.0;
    l2.W(1, 0) = -1.0;
    l2.W(1, 1) = -1.0;
    l2.W(2, 2) = 1.0;
    l2.W(3, 3) = 1.0;
    FfnLayer l3{Matrix(kD, 4), std::vector<double>(kD, 0.0)};
    l3.W(0, 0) = 1.0;
    l3.W(0, 1) = -1.0;
    l3.W(1, 2) = -1.0;
    l3.W(1, 3) = 1.0;
    return FeedForward{{std::move(l1), std::move(l2), std::move(l3)}};
}

FeedForward compose_ffn(const FeedForward& first, const FeedForward& second) {
    if (second.layers.empty())
        return {};
    if (first.layers.empty()) {
        std::vector<double> zero(second.in_dim(), 0.0);
        FfnLayer c{Matrix(second.out_dim(), kD), ffn_apply(second, zero)};
        return FeedForward{{std::move(c)}};
    }
    FeedForward out;
    out.layers.assign(first.layers.begin(), first.layers.end() - 1);
    const FfnLayer& a = first.layers.back();
    const FfnLayer& b = second.layers.front();
    if (b.W.cols() != a.W.rows())
        fail(ErrorKind::dimension, "ffn composition shapes do not match");
    FfnLayer merged{matmul(b.W, a.W), b.b};
    for (std::size_t r = 0; r < b.W.rows(); ++r)
        for (std::size_t k = 0; k < b.W.cols(); ++k)
            merged.b[r] += b.W(r, k) * a.b[k];
    out.layers.push_back(std::move(merged));
    out.layers.insert(out.layers.end(), second.layers.begin() + 1, second.layers.end());
    return out;
}

FeedForward data_projection() {
    FfnLayer p{Matrix(kD, kD), std::vector<double>(kD, 0.0)};
    p.W(0, 0) = 1.0;
    p.W(1, 1) = 1.0;
    return FeedForward{{std::move(p)}};
}

FeedForward carry_frame(const FeedForward& f) {
    if (f.layers.empty()) {
        FfnLayer l{Matrix(kD, kD), std::vector<double>(kD, 0.0)};
        for (std::size_t r = 2; r < kD; ++r)
            l.W(r, r) = 1.0;
        return FeedForward{{std::move(l)}};
    }
    FeedForward out;
    const std::size_t n = f.layers.size();
    for (std::size_t i = 0; i < n; ++i) {
        const FfnLayer& L = f.layers[i];
        const bool last = i + 1 == n;
        const std::size_t in = i == 0 ? kD : L.W.cols() + 3;
        const std::size_t rows = last ? kD : L.W.rows() + 3;
        FfnLayer c{Matrix(rows, in), std::vector<double>(rows, 0.0)};
        const std::size_t keep = last ? 2 : L.W.rows();
        for (std::size_t r = 0; r < keep; ++r) {
            for (std::size_t k = 0; k < L.W.cols(); ++k)
                c.W(r, k) = L.W(r, k);
            c.b[r] = L.b[r];
        }
        const std::size_t src = i == 0 ? 2 : L.W.cols();
        const std::size_t dst = last ? 2 : L.W.rows();
        for (std::size_t j = 0; j < 3; ++j)
            c.W(dst + j, src + j) = 1.0;
        out.layers.push_back(std::move(c));
    }
    return out;
}

FeedForward sum_ffns(const std::vector<FeedForward>& parts) {
    std::vector<FeedForward> live;
    for (const auto& p : parts)
        if (!p.layers.empty())
            live.push_back(p);
    if (live.empty())
        return {};
    if (live.size() == 1)
        return live[0];
    std::size_t depth = 0;
    for (const auto& p : live)
        depth = std::max(depth, p.depth());
    bool all_linear = depth == 1;
    if (all_linear) {
        FfnLayer s{Matrix(kD, kD), std::vector<double>(kD, 0.0)};
        for (const auto& p : live)
            for (std::size_t r = 0; r < kD; ++r) {
                for (std::size_t c = 0; c < kD; ++c)
                    s.W(r, c) += p.layers[0].W(r, c);
                s.b[r] += p.layers[0].b[r];
            }
        return FeedForward{{std::move(s)}};
    }
    for (auto& p : live)
        p = pad_depth(std::move(p), depth);
    FeedForward out;
    for (std::size_t li = 0; li < depth; ++li) {
        const bool first = li == 0, last = li + 1 == depth;
        std::size_t rows = 0, cols = 0;
        for (const auto& p : live) {
            rows += last ? 0 : p.layers[li].W.rows();
            cols += first ? 0 : p.layers[li].W.cols();
        }
        if (last)
            rows = kD;
        if (first)
            cols = kD;
        FfnLayer m{Matrix(rows, cols), std::vector<double>(rows, 0.0)};
        std::size_t ro = 0, co = 0;
        for (const auto& p : live) {
            const FfnLayer& L = p.layers[li];
            for (std::size_t r = 0; r < L.W.rows(); ++r) {
                for (std::size_t c = 0; c < L.W.cols(); ++c)
                    m.W((last ? 0 : ro) + r, (first ? 0 : co) + c) = L.W(r, c);
                m.b[(last ? 0 : ro) + r] += L.b[r];
            }
            ro += last ? 0 : L.W.rows();
            co += first ? 0 : L.W.cols();
        }
        out.layers.push_back(std::move(m));
    }
    return out;
}

double ffn_output_bound(const FeedForward& ffn, double m) {
    if (ffn.layers.empty())
        return 0.0;
    std::vector<double> lo = {-m, -m, 0.0, 0.0, 1.0}, hi = {m, m, 1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < ffn.layers.size(); ++i) {
        const FfnLayer& L = ffn.layers[i];
        std::vector<double> nlo(L.W.rows()), nhi(L.W.rows());
        for (std::size_t r = 0; r < L.W.rows(); ++r) {
            double a = L.b[r], b = L.b[r];
            for (std::size_t c = 0; c < L.W.cols(); ++c) {
                const double w = L.W(r, c);
                a += std::min(w * lo[c], w * hi[c]);
                b += std::max(w * lo[c], w * hi[c]);
            }
            if (i + 1 < ffn.layers.size()) {
                a = std::max(a, 0.0);
                b = std::max(b, 0.0);
            }
            nlo[r] = a;
            nhi[r] = b;
        }
        lo.swap(nlo);
        hi.swap(nhi);
    }
    double out = 0.0;
    for (std::size_t r = 0; r < 2 && r < lo.size(); ++r)
        out = std::max({out, std::fabs(lo[r]), std::fabs(hi[r])});
    return out * (1.0 + 1e-12);
}

FeedForward restrict_delta(const FeedForward& delta, std::size_t first, std::size_t last,
                           double delta_bound, std::size_t tokens) {
    if (first < 1 || last > tokens || first > last)
        fail(ErrorKind::parameter, "token range outside the layout");
    if (delta.layers.empty())
        return {};
    FeedForward g = carry_frame(delta);
    const StructuredLayout gate_layout(tokens, std::max(delta_bound, 1.0));
    if (first > 1)
        g = compose_ffn(g, make_gating_ffn(first - 1, KeepSide::suffix, gate_layout));
    if (last < tokens)
        g = compose_ffn(g, make_gating_ffn(last, KeepSide::prefix, gate_layout));
    return compose_ffn(g, data_projection());
}

bool reads_interaction(const FeedForward& ffn) {
    if (ffn.layers.empty())
        return false;
    const Matrix& W = ffn.layers.front().W;
    for (std::size_t r = 0; r < W.rows(); ++r)
        if (W(r, 2) != 0.0 || W(r, 3) != 0.0)
            return true;
    return false;
}

}  // namespace tfa
