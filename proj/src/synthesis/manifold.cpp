// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfa/error.hpp"
#include "tfa/runtime/forward.hpp"

namespace tfa {
namespace {

DataKernelPair row_kernel(std::initializer_list<std::pair<std::size_t, double>> q,
                          std::initializer_list<std::pair<std::size_t, double>> k) {
    Matrix Q(2, 5), K(2, 5);
    for (auto [c, v] : q)
        Q(0, c) = v;
    for (auto [c, v] : k)
        K(0, c) = v;
    return DataKernelPair::fitted(std::move(Q), std::move(K));
}

HeadSpec head(std::size_t t1, std::optional<std::size_t> t2, std::size_t out_row, DataKernelPair kp,
              double sign = 1.0) {
    HeadSpec h;
    h.t1 = t1;
    h.t2 = t2;
    h.out_row = out_row;
    h.kernels = std::move(kp);
    h.sign = sign;
    return h;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// every point of [0,1]^d on a k^d grid, first axis slowest
template <class F>
void for_grid(std::size_t d, std::size_t k, F&& visit) {
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> y(d);
    while (true) {
        for (std::size_t i = 0; i < d; ++i)
            y[i] = double(idx[i]) / double(k - 1);
        visit(idx, y);
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < k)
                break;
            idx[a] = 0;
            if (a == 0)
                return;
        }
    }
}

double min_radius(const Atlas& a) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : a.charts)
        r = std::min(r, c.radius);
    return r;
}

}  // namespace

double indicator(double s, double r2, double delta) {
    if (s <= r2 - delta)
        return 1.0;
    if (s >= r2)
        return 0.0;
    return (r2 - s) / delta;
}

bool invert_projection(const Atlas& atlas, std::size_t n, std::span<const double> y, double tol,
                       std::vector<double>& x) {
    const Chart& ch = atlas.charts[n];
    const std::size_t d = atlas.d, D = atlas.D;
    std::vector<double> tau(d);
    for (std::size_t i = 0; i < d; ++i)
        tau[i] = y[i] / ch.scale - ch.offset[i];
    x = ch.center;
    bool done = false;
    for (int it = 0; it < 500 && !done; ++it) {
        auto t = ch.tangent(x);
        double err = 0.0;
        std::vector<double> step(D, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double r = tau[i] - t[i];
            err = std::max(err, std::fabs(r));
            for (std::size_t j = 0; j < D; ++j)
                step[j] += ch.basis(j, i) * r;
        }
        if (err < tol) {
            done = true;
            break;
        }
        for (std::size_t j = 0; j < D; ++j)
            step[j] += x[j];
        x = atlas.closest_point(step);
        if (sq_dist(x, ch.center) > 4.0 * ch.radius * ch.radius)
            return false;
    }
    return done && sq_dist(x, ch.center) <= ch.radius * ch.radius;
}

double local_function(const Atlas& atlas, const HolderTarget& target, std::size_t n, std::span<const double> y,
                      double tol) {
    std::vector<double> x;
    if (!invert_projection(atlas, n, y, tol, x))
        return 0.0;
    const double rho = atlas.pou(n, x);
    return rho == 0.0 ? 0.0 : target(x) * rho;
}

ManifoldModel build_manifold_model(const Atlas& atlas, const HolderTarget& target, double eps,
                                   const ManifoldOptions& opt) {
    if (!(eps > 0.0 && eps < 1.0))
        fail(ErrorKind::parameter, "accuracy must lie in (0, 1)");
    if (target.dim != atlas.D)
        fail(ErrorKind::dimension, "target is defined on R^" + std::to_string(target.dim) + ", atlas lives in R^" +
                                       std::to_string(atlas.D));
    if (atlas.charts.empty())
        fail(ErrorKind::parameter, "atlas has no charts");
    ManifoldModel m;
    m.atlas = atlas;
    m.target = target;
    m.eps = eps;
    const double r = min_radius(atlas);
    m.ramp_width = opt.ramp_width > 0.0
                       ? opt.ramp_width
                       : std::min(eps * r / (2.0 * std::max(1.0, target.holder_constant)), 0.5 * r * r);
    if (!(m.ramp_width > 0.0 && m.ramp_width < r * r))
        fail(ErrorKind::parameter, "ramp width must lie in (0, r^2)");
    const std::size_t d = atlas.d, C = atlas.charts.size();
    // only charts whose ball holds x contribute at x
    for (const auto& x : atlas.validation_points(4096)) {
        std::size_t k = 0;
        for (const auto& ch : atlas.charts)
            k += sq_dist(x, ch.center) < ch.radius * ch.radius * (1.0 + 1e-6) ? 1 : 0;
        m.overlap = std::max(m.overlap, k);
    }
    m.overlap = std::max<std::size_t>(m.overlap, 1);
    m.delta1 = eps / (2.0 * double(m.overlap));

    std::size_t k = opt.holder_resolution;
    if (k == 0)
        k = d == 1 ? 4097 : d == 2 ? 257 : 17;
    const std::size_t cells = checked_power(k, d, opt.grid_budget);
    if (cells > opt.grid_budget || cells > opt.grid_budget / C)
        fail(ErrorKind::resource, "Lipschitz estimate exceeds the evaluation budget");
    double H = 0.0;
    std::vector<double> vals(cells);
    for (std::size_t n = 0; n < C; ++n) {
        std::size_t p = 0;
        for_grid(d, k, [&](const std::vector<std::size_t>&, const std::vector<double>& y) {
            vals[p++] = local_function(atlas, target, n, y, opt.inversion_tol);
        });
        std::vector<double> grad(d, 0.0);
        std::size_t stride = 1;
        for (std::size_t a = d; a-- > 0;) {
            for (std::size_t q = 0; q < cells; ++q) {
                if ((q / stride) % k == k - 1)
                    continue;
                grad[a] = std::max(grad[a], std::fabs(vals[q + stride] - vals[q]) * double(k - 1));
            }
            stride *= k;
        }
        double g2 = 0.0;
        for (double g : grad)
            g2 += g * g;
        H = std::max(H, std::sqrt(g2));
    }
    m.local_holder = std::max(H * opt.holder_safety, 1e-12);
    m.N = choose_N(m.delta1, d, m.local_holder, 1.0);
    const std::size_t per = checked_power(m.N, d, opt.grid_budget);
    if (per > opt.grid_budget / C)
        fail(ErrorKind::resource, "local grids need " + std::to_string(C) + " x " + std::to_string(m.N) + "^" +
                                      std::to_string(d) + " evaluations, budget is " +
                                      std::to_string(opt.grid_budget));
    for (std::size_t n = 0; n < C; ++n) {
        GridApprox g{d, m.N, std::vector<double>(per)};
        std::vector<double> y(d), x;
        for (std::size_t p = 0; p < per; ++p) {
            for (std::size_t i = 0; i < d; ++i)
                y[i] = g.center(g.axis_index(p, i));
            if (invert_projection(atlas, n, y, opt.inversion_tol, x)) {
                const double rho = atlas.pou(n, x);
                g.values[p] = rho == 0.0 ? 0.0 : target(x) * rho;
            } else {
                ++m.outside_points;
            }
        }
        m.grids.push_back(std::move(g));
    }
    return m;
}

double manifold_oracle(const ManifoldModel& m, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t n = 0; n < m.atlas.charts.size(); ++n) {
        const Chart& ch = m.atlas.charts[n];
        const double ind = indicator(sq_dist(x, ch.center), ch.radius * ch.radius, m.ramp_width);
        if (ind == 0.0)
            continue;
        s += pou_oracle(m.grids[n], ch.project(x)) * ind;
    }
    return s;
}

BlockSpec chart_projection_spec(const Chart& ch, std::size_t D, double Mx) {
    const std::size_t d = ch.basis.cols();
    if (ch.center.size() != D || ch.basis.rows() != D)
        fail(ErrorKind::dimension, "chart does not match the ambient dimension");
    BlockSpec s;
    s.tokens = D + d;
    s.data_bound = 2.0 * Mx;
    s.ffn_input_bound = 2.0 * Mx * double(D) * 2.0 + 2.0 * Mx;
    s.provenance = "chart-projection";
    const double shift = 2.0 * Mx;  // keeps every score nonnegative for |x|, |c| <= Mx
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= D; ++j) {
            const double v = ch.basis(j - 1, i - 1);
            s.heads.push_back(head(D + i, j, 1, row_kernel({{4, 1.0}}, {{0, v}, {4, shift - v * ch.center[j - 1]}})));
        }
    std::vector<FfnSpec> leaves;
    for (std::size_t i = 1; i <= d; ++i) {
        FfnLayer lin{Matrix(5, 5), std::vector<double>(5, 0.0)};
        lin.W(0, 0) = ch.scale - 1.0;
        lin.b[0] = ch.scale * (ch.offset[i - 1] - shift * double(D));
        FfnSpec leaf = FfnSpec::gated(FeedForward{{std::move(lin)}}, D + i, D + i);
        if (!leaves.empty() && leaves.back().delta == leaf.delta)
            leaves.back().last = D + i;
        else
            leaves.push_back(std::move(leaf));
    }
    if (leaves.size() == 1) {
        s.ffn = leaves[0];
    } else {
        s.ffn.kind = FfnSpec::Kind::parallel;
        s.ffn.branches = std::move(leaves);
    }
    return s;
}

MaterializedBlock synthesize_chart_projection(const Chart& ch, std::size_t D, double Mx) {
    return materialize(chart_projection_spec(ch, D, Mx));
}

double chart_projection_error(const Chart& ch, std::size_t D, double Mx,
                              const std::vector<std::vector<double>>& points, double* cancellation) {
    const std::size_t d = ch.basis.cols();
    const auto mb = synthesize_chart_projection(ch, D, Mx);
    if (cancellation)
        *cancellation = mb.cancellation;
    const Matrix frame = StructuredLayout(D + d, 1.0).positional();
    double err = 0.0;
    for (const auto& x : points) {
        if (x.size() != D)
            fail(ErrorKind::dimension, "projection check point has the wrong dimension");
        EmbeddingMatrix H = frame;
        for (std::size_t j = 0; j < D; ++j)
            H(0, j) = x[j];
        const EmbeddingMatrix out = block_forward(mb.block, H);
        const auto y = ch.project(x);
        for (std::size_t i = 0; i < d; ++i)
            err = std::max(err, std::fabs(out(0, D + i) - y[i]));
    }
    return err;
}

FeedForward make_ramp_ffn(double r2, double delta) {
    if (!(delta > 0.0 && delta < r2))
        fail(ErrorKind::parameter, "ramp width must lie in (0, r^2)");
    const std::size_t L = std::max<std::size_t>(1, std::size_t(std::ceil(std::log(1.0 / delta))));
    const double a = std::pow(1.0 / delta, 1.0 / double(L));
    FeedForward f;
    FfnLayer first{Matrix(2, 5), {-(r2 - delta), 0.0}};
    first.W(0, 1) = 1.0;
    first.W(1, 1) = 1.0;
    f.layers.push_back(std::move(first));
    for (std::size_t k = 0; k < L; ++k) {
        FfnLayer up{Matrix(2, 2), {0.0, 0.0}};
        up.W(0, 0) = a;
        up.W(1, 1) = 1.0;
        f.layers.push_back(std::move(up));
    }
    FfnLayer flip{Matrix(2, 2), {1.0, 0.0}};
    flip.W(0, 0) = -1.0;
    flip.W(1, 1) = 1.0;
    f.layers.push_back(std::move(flip));
    FfnLayer out{Matrix(5, 2), std::vector<double>(5, 0.0)};
    out.W(0, 0) = 1.0;
    out.W(1, 1) = -1.0;
    f.layers.push_back(std::move(out));
    return f;
}

std::vector<BlockSpec> indicator_specs(const Chart& ch, double delta, std::size_t D, double Mx) {
    if (ch.center.size() != D)
        fail(ErrorKind::dimension, "chart does not match the ambient dimension");
    const double r2 = ch.radius * ch.radius;
    if (!(delta > 0.0 && delta < r2))
        fail(ErrorKind::parameter, "ramp width must lie in (0, r^2)");
    const std::size_t l = 2 * D + 1, ind = 2 * D + 1;
    const double sq = 4.0 * Mx * Mx;
    std::vector<BlockSpec> out;

    out.push_back(shift_block(make_addition_spec(ch.center, StructuredLayout(2 * D, 2.0 * Mx)), 0, l));

    BlockSpec square;
    square.tokens = l;
    square.data_bound = 2.0 * Mx;
    square.ffn_input_bound = 2.0 * Mx + sq;
    square.provenance = "indicator/square";
    for (std::size_t j = 1; j <= D; ++j)
        square.heads.push_back(head(D + j, D + j, 2, row_kernel({{0, 1.0}}, {{0, 1.0}})));
    square.ffn = FfnSpec::gated(make_replace_ffn(), D + 1, 2 * D);
    out.push_back(std::move(square));

    BlockSpec sum;
    sum.tokens = l;
    sum.data_bound = std::max(2.0 * Mx, sq);
    sum.ffn_input_bound = std::max(2.0 * Mx, sq * double(D));
    sum.provenance = "indicator/sum-ramp";
    for (std::size_t j = 1; j <= D; ++j)
        sum.heads.push_back(head(ind, D + j, 2, row_kernel({{4, 1.0}}, {{0, 1.0}})));
    sum.ffn = FfnSpec::gated(make_ramp_ffn(r2, delta), ind, ind);
    out.push_back(std::move(sum));
    return out;
}

std::vector<MaterializedBlock> synthesize_indicator_net(const Chart& ch, double delta, std::size_t D, double Mx) {
    std::vector<MaterializedBlock> out;
    for (const auto& s : indicator_specs(ch, delta, D, Mx))
        out.push_back(materialize(s));
    return out;
}

ManifoldLayout::ManifoldLayout(std::size_t D_, std::size_t d_, std::size_t charts_, std::size_t N, std::size_t cap)
    : D(D_), d(d_), charts(charts_), cube(d_, N, cap) {
    lane = D + cube.tokens + 2 * D + 1;
    if (charts == 0 || lane > (cap - 1) / charts)
        fail(ErrorKind::resource, "manifold layout exceeds the token cap " + std::to_string(cap));
    tokens = charts * lane + 1;
}

ManifoldNet synthesize_manifold_approximator(const ManifoldModel& m, const ManifoldOptions& opt) {
    const Atlas& at = m.atlas;
    const std::size_t D = at.D, d = at.d, C = at.charts.size();
    ManifoldNet out;
    out.layout = ManifoldLayout(D, d, C, m.N, opt.token_cap);
    const ManifoldLayout& L = out.layout;
    const CubeLayout& cube = L.cube;
    const double Mx = at.ambient_bound;

    double R = m.target.sup_bound, phi = 1.0;
    for (const auto& g : m.grids)
        for (double v : g.values)
            R = std::max(R, std::fabs(v));
    for (const auto& ch : at.charts) {
        double u = 0.0;
        for (double o : ch.offset)
            u = std::max(u, std::fabs(o));
        phi = std::max(phi, ch.scale * (2.0 * Mx * std::sqrt(double(D)) + u));
    }
    // one bound for every stage: inputs, shifted copies, squares, projections, products
    const double M = std::max({2.0 * Mx, 4.0 * Mx * Mx * double(D), phi + 2.0, R, 1.0});

    const std::size_t p_tokens = D + cube.tokens, i_tokens = 2 * D + 1;
    std::vector<std::vector<BlockSpec>> ind(C);
    for (std::size_t c = 0; c < C; ++c)
        ind[c] = indicator_specs(at.charts[c], m.ramp_width, D, Mx);
    const FeedForward pre = cube_precompute_ffn(m.N);

    auto lanes = [&](auto&& p_part, auto&& i_part, BlockSpec tail) {
        std::vector<BlockSpec> parts;
        for (std::size_t c = 0; c < C; ++c) {
            parts.push_back(p_part(c));
            parts.push_back(i_part(c));
        }
        parts.push_back(std::move(tail));
        BlockSpec s = parallelize(parts);
        s.data_bound = M;
        s.ffn_input_bound = std::max(s.ffn_input_bound, M);
        return s;
    };
    auto empty_p = [&](std::size_t) { return empty_block(p_tokens, M); };
    auto empty_i = [&](std::size_t) { return empty_block(i_tokens, M); };

    std::vector<std::pair<BlockSpec, std::string>> stages;
    stages.emplace_back(
        lanes([&](std::size_t c) { return shift_block(chart_projection_spec(at.charts[c], D, Mx), 0, p_tokens); },
              [&](std::size_t c) { return ind[c][0]; }, empty_block(1, M)),
        "manifold/projection+shift");
    stages.emplace_back(lanes(empty_p, [&](std::size_t c) { return ind[c][1]; }, empty_block(1, M)),
                        "manifold/square");
    stages.emplace_back(lanes(empty_p, [&](std::size_t c) { return ind[c][2]; }, empty_block(1, M)),
                        "manifold/indicator");
    {
        BlockSpec inert_i = empty_block(i_tokens, M);
        inert_i.ffn = FfnSpec::independent(pre);
        BlockSpec inert_o = empty_block(1, M);
        inert_o.ffn = FfnSpec::independent(pre);
        const BlockSpec P = shift_block(cube_precompute_spec(cube, phi), D, p_tokens, true);
        stages.emplace_back(lanes([&](std::size_t) { return P; }, [&](std::size_t) { return inert_i; }, inert_o),
                            "manifold/precompute");
    }
    {
        const BlockSpec P = shift_block(cube_copy_spec(cube, phi), D, p_tokens);
        stages.emplace_back(lanes([&](std::size_t) { return P; }, empty_i, empty_block(1, M)), "manifold/copy");
    }
    for (const auto& prod : cube_product_specs(cube, phi)) {
        const BlockSpec P = shift_block(prod, D, p_tokens);
        stages.emplace_back(lanes([&](std::size_t) { return P; }, empty_i, empty_block(1, M)),
                            "manifold/" + prod.provenance.substr(5));
    }
    {
        BlockSpec mul = empty_block(L.tokens, M);
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t n = 1; n <= cube.patches; ++n) {
                const double f = m.grids[c].values[n - 1];
                if (f == 0.0)
                    continue;
                mul.heads.push_back(head(L.cube_token(c, cube.patch_slot(n, 1)), L.indicator_token(c), 2,
                                         row_kernel({{0, 1.0}}, {{0, std::fabs(f)}}), f > 0.0 ? 1.0 : -1.0));
            }
        stages.emplace_back(std::move(mul), "manifold/multiply");
    }
    {
        BlockSpec sum = empty_block(L.tokens, M);
        sum.heads.push_back(head(L.output_token(), std::nullopt, 1, row_kernel({{4, 1.0}}, {{1, 1.0}})));
        sum.heads.push_back(head(L.output_token(), std::nullopt, 1, row_kernel({{4, 1.0}}, {{1, -1.0}}), -1.0));
        stages.emplace_back(std::move(sum), "manifold/sum");
    }

    TransformerNet& net = out.net;
    net.input_dim = D;
    net.token_count = L.tokens;
    net.embed_dim = 5;
    net.input_map = Matrix(L.tokens, D);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t j = 1; j <= D; ++j) {
            net.input_map(L.x_token(c, j) - 1, j - 1) = 1.0;
            net.input_map(L.copy_token(c, j) - 1, j - 1) = 1.0;
        }
    net.column_lift = {1.0, 0.0, 0.0, 0.0, 0.0};
    net.positional = StructuredLayout(L.tokens, 1.0).positional();
    net.output_clip = R;
    net.provenance = "manifold";
    net.layout = "charts=" + std::to_string(C) + " lane=[x(" + std::to_string(D) + ") | cube(" +
                 std::to_string(cube.tokens) + ") | x(" + std::to_string(D) + ") work(" + std::to_string(D) +
                 ") indicator(1)] output=" + std::to_string(L.tokens) + "; cube " + cube.describe();
    for (auto& [spec, name] : stages) {
        spec.provenance = name;
        auto mb = materialize(spec);
        net.cancellation_scale = std::max(net.cancellation_scale, mb.cancellation);
        net.blocks.push_back(std::move(mb.block));
    }
    out.projection_block = 0;
    out.indicator_block = 2;
    return out;
}

}  // namespace tfa
