// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tfa/blocks/builders.hpp"
#include "tfa/error.hpp"

namespace tfa {
namespace {

// per-axis (index, weight) pairs with nonzero weight; at most 3 near a boundary
std::size_t axis_terms(std::size_t N, double x, std::size_t* idx, double* w) {
    const double scale = 3.0 * double(N - 1);
    const double pos = x * double(N - 1);
    const double base = std::floor(pos);
    std::size_t n = 0;
    for (int off = -1; off <= 2; ++off) {
        const double j0 = base + off;  // 0-based grid index
        if (j0 < 0.0 || j0 > double(N - 1))
            continue;
        const double g = j0 / double(N - 1);
        const double v = psi(scale * (x - g));
        if (v != 0.0) {
            idx[n] = std::size_t(j0);
            w[n] = v;
            ++n;
        }
    }
    return n;
}

template <class F>
void for_each_term(std::size_t d, std::size_t N, std::span<const double> x, F&& visit) {
    if (x.size() != d)
        fail(ErrorKind::dimension, "point has " + std::to_string(x.size()) + " coordinates, grid has " + std::to_string(d));
    std::vector<std::size_t> idx(4 * d);
    std::vector<double> w(4 * d);
    std::vector<std::size_t> cnt(d);
    for (std::size_t i = 0; i < d; ++i) {
        cnt[i] = axis_terms(N, x[i], &idx[4 * i], &w[4 * i]);
        if (cnt[i] == 0)
            return;
    }
    std::vector<std::size_t> pick(d, 0);
    while (true) {
        std::size_t flat = 0;
        double weight = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            flat = flat * N + idx[4 * i + pick[i]];
            weight *= w[4 * i + pick[i]];
        }
        visit(flat, weight);
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++pick[a] < cnt[a])
                break;
            pick[a] = 0;
            if (a == 0)
                return;
        }
        if (d == 0)
            return;
    }
}

}  // namespace

std::size_t GridApprox::axis_index(std::size_t p, std::size_t axis) const noexcept {
    for (std::size_t a = d; a-- > axis + 1;)
        p /= N;
    return p % N + 1;
}

std::size_t choose_N(double eps, std::size_t d, double H, double beta) {
    if (!(eps > 0.0 && eps < 1.0))
        fail(ErrorKind::parameter, "accuracy must lie in (0, 1)");
    if (d == 0 || !(H > 0.0) || !(beta > 0.0 && beta <= 1.0))
        fail(ErrorKind::parameter, "choose_N needs d >= 1, H_f > 0, beta in (0, 1]");
    const double v = double(d) * std::pow(std::ldexp(H, int(d)) / eps, 1.0 / beta) + 1.0;
    if (!std::isfinite(v) || v > 1e15)
        fail(ErrorKind::resource, "grid resolution overflows");
    // formula values that are integers up to rounding stay integers
    const double n = std::ceil(v * (1.0 - 1e-12));
    return std::max<std::size_t>(2, std::size_t(n));
}

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > cap / base)
            return std::numeric_limits<std::size_t>::max();
        r *= base;
    }
    return r;
}

GridApprox grid_from_values(std::size_t d, std::size_t N, std::vector<double> values) {
    if (d == 0 || N < 2)
        fail(ErrorKind::parameter, "grid needs d >= 1 and N >= 2");
    if (values.size() != checked_power(N, d, std::numeric_limits<std::size_t>::max()))
        fail(ErrorKind::dimension, "grid value count is not N^d");
    for (double v : values)
        if (!std::isfinite(v))
            fail(ErrorKind::input, "grid values must be finite");
    return GridApprox{d, N, std::move(values)};
}

GridApprox build_grid(const HolderTarget& target, std::size_t d, std::size_t N, std::size_t budget) {
    if (d == 0 || N < 2)
        fail(ErrorKind::parameter, "grid needs d >= 1 and N >= 2");
    if (target.dim != d)
        fail(ErrorKind::dimension, "target dimension differs from grid dimension");
    const std::size_t count = checked_power(N, d, budget);
    if (count > budget)
        fail(ErrorKind::resource, "grid needs " + std::to_string(N) + "^" + std::to_string(d) +
                                      " evaluations, budget is " + std::to_string(budget));
    GridApprox g{d, N, std::vector<double>(count)};
    std::vector<double> x(d);
    for (std::size_t p = 0; p < count; ++p) {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = g.center(g.axis_index(p, i));
        g.values[p] = target(x);
    }
    return g;
}

double pou_oracle(const GridApprox& grid, std::span<const double> x) {
    double s = 0.0;
    for_each_term(grid.d, grid.N, x, [&](std::size_t flat, double w) { s += grid.values[flat] * w; });
    return s;
}

double pou_weight_sum(std::size_t d, std::size_t N, std::span<const double> x) {
    double s = 0.0;
    for_each_term(d, N, x, [&](std::size_t, double w) { s += w; });
    return s;
}

double cube_error_bound(std::size_t d, std::size_t N, double H, double beta) {
    return std::ldexp(1.0, int(d)) * std::pow(double(d), beta) * H / std::pow(double(N - 1), beta);
}

}  // namespace tfa
