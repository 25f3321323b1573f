// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "tfa/error.hpp"

namespace tfa {
namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dist2(a, std::vector<double>(a.size(), 0.0))); }

std::string point_str(std::span<const double> x) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", x[i]);
        s += buf;
    }
    return s + ")";
}

// orthonormal complement of the unit vector n, by Gram-Schmidt on the axes
Matrix tangent_basis(const std::vector<double>& n) {
    const std::size_t D = n.size();
    std::vector<std::vector<double>> cols;
    std::vector<std::size_t> order(D);
    for (std::size_t i = 0; i < D; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(n[a]) < std::fabs(n[b]) || (std::fabs(n[a]) == std::fabs(n[b]) && a < b);
    });
    for (std::size_t k : order) {
        if (cols.size() + 1 == D)
            break;
        std::vector<double> v(D, 0.0);
        v[k] = 1.0;
        auto remove = [&](const std::vector<double>& u) {
            double p = 0.0;
            for (std::size_t i = 0; i < D; ++i)
                p += u[i] * v[i];
            for (std::size_t i = 0; i < D; ++i)
                v[i] -= p * u[i];
        };
        remove(n);
        for (const auto& c : cols)
            remove(c);
        const double len = norm(v);
        if (len < 1e-8)
            continue;
        for (auto& x : v)
            x /= len;
        cols.push_back(std::move(v));
    }
    Matrix B(D, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < D; ++i)
            B(i, j) = cols[j][i];
    return B;
}

Chart make_chart(std::vector<double> c, double r, Matrix basis) {
    Chart ch;
    const std::size_t d = basis.cols();
    ch.center = std::move(c);
    ch.radius = r;
    ch.basis = std::move(basis);
    ch.scale = std::min(1.0, 1.0 / (2.0 * r));
    ch.offset.assign(d, r);
    return ch;
}

std::vector<std::vector<double>> fibonacci_sphere(std::size_t n) {
    std::vector<std::vector<double>> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * double(i);
        pts.push_back({rho * std::cos(th), rho * std::sin(th), z});
    }
    return pts;
}

}  // namespace

std::vector<double> Chart::tangent(std::span<const double> x) const {
    std::vector<double> t(basis.cols(), 0.0);
    for (std::size_t i = 0; i < basis.cols(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < center.size(); ++j)
            s += basis(j, i) * (x[j] - center[j]);
        t[i] = s;
    }
    return t;
}

std::vector<double> Chart::project(std::span<const double> x) const {
    auto t = tangent(x);
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = scale * (t[i] + offset[i]);
    return t;
}

ManifoldShape shape_from_name(const std::string& name) {
    if (name == "circle")
        return ManifoldShape::circle;
    if (name == "sphere")
        return ManifoldShape::sphere;
    if (name == "flat_patch")
        return ManifoldShape::flat_patch;
    fail(ErrorKind::config, "unknown manifold shape \"" + name + "\"");
}

const char* shape_name(ManifoldShape s) {
    switch (s) {
    case ManifoldShape::circle:
        return "circle";
    case ManifoldShape::sphere:
        return "sphere";
    case ManifoldShape::flat_patch:
        return "flat_patch";
    }
    return "?";
}

std::vector<double> Atlas::closest_point(std::span<const double> x) const {
    std::vector<double> p(x.begin(), x.end());
    if (shape == ManifoldShape::flat_patch) {
        std::vector<double> t(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < D; ++j)
                t[i] += plane(j, i) * (x[j] - origin[j]);
        for (std::size_t j = 0; j < D; ++j) {
            p[j] = origin[j];
            for (std::size_t i = 0; i < d; ++i)
                p[j] += plane(j, i) * t[i];
        }
        return p;
    }
    const double n = norm(x);
    if (n == 0.0)
        fail(ErrorKind::domain, "the origin has no closest point on the sphere");
    for (auto& v : p)
        v /= n;
    return p;
}

bool Atlas::on_manifold(std::span<const double> x, double tol) const {
    if (x.size() != D)
        return false;
    auto p = closest_point(x);
    if (std::sqrt(dist2(p, x)) > tol)
        return false;
    if (shape == ManifoldShape::flat_patch)
        return std::sqrt(dist2(p, origin)) <= extent + tol;
    return true;
}

std::vector<std::vector<double>> Atlas::sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> pts;
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> x(D, 0.0);
        if (shape == ManifoldShape::flat_patch) {
            std::vector<double> t(d);
            double len;
            do {
                for (auto& v : t)
                    v = 2.0 * u(rng) - 1.0;
                len = norm(t);
            } while (len > 1.0);
            for (std::size_t j = 0; j < D; ++j) {
                x[j] = origin[j];
                for (std::size_t i = 0; i < d; ++i)
                    x[j] += plane(j, i) * extent * t[i];
            }
        } else {
            double len;
            do {
                for (auto& v : x)
                    v = g(rng);
                len = norm(x);
            } while (len < 1e-12);
            for (auto& v : x)
                v /= len;
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

std::vector<std::vector<double>> Atlas::validation_points(std::size_t n) const {
    std::vector<std::vector<double>> pts;
    if (shape == ManifoldShape::circle) {
        for (std::size_t k = 0; k < n; ++k) {
            const double th = 2.0 * std::numbers::pi * (double(k) + 0.5) / double(n);
            pts.push_back({std::cos(th), std::sin(th)});
        }
    } else if (shape == ManifoldShape::sphere && D == 3) {
        pts = fibonacci_sphere(n);
    } else if (shape == ManifoldShape::flat_patch && d == 2) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < n; ++k) {
            const double rho = extent * std::sqrt((double(k) + 0.5) / double(n));
            const double th = golden * double(k);
            std::vector<double> x(origin);
            for (std::size_t j = 0; j < D; ++j)
                x[j] += plane(j, 0) * rho * std::cos(th) + plane(j, 1) * rho * std::sin(th);
            pts.push_back(std::move(x));
        }
    } else {
        pts = sample(n, 0x7a11a5);
    }
    return pts;
}

double Atlas::bump(std::size_t n, std::span<const double> x) const {
    const Chart& c = charts[n];
    const double w = std::max(0.0, 1.0 - dist2(x, c.center) / (c.radius * c.radius));
    return w * w;
}

double Atlas::bump_sum(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t n = 0; n < charts.size(); ++n)
        s += bump(n, x);
    return s;
}

double Atlas::pou(std::size_t n, std::span<const double> x) const {
    const double w = bump(n, x);
    if (w == 0.0)
        return 0.0;
    return w / bump_sum(x);
}

Atlas make_atlas(ManifoldShape shape, std::size_t count, const AtlasParams& p) {
    if (count == 0)
        fail(ErrorKind::parameter, "atlas needs at least one chart");
    Atlas a;
    a.shape = shape;
    a.cover_threshold = p.cover_threshold;
    switch (shape) {
    case ManifoldShape::circle: {
        a.D = 2;
        a.d = 1;
        a.reach = 1.0;
        a.ambient_bound = 1.0;
        const double r = p.radius > 0.0 ? p.radius : a.reach / 4.0;
        for (std::size_t n = 0; n < count; ++n) {
            const double th = 2.0 * std::numbers::pi * double(n) / double(count);
            Matrix V(2, 1);
            V(0, 0) = -std::sin(th);
            V(1, 0) = std::cos(th);
            a.charts.push_back(make_chart({std::cos(th), std::sin(th)}, r, std::move(V)));
        }
        break;
    }
    case ManifoldShape::sphere: {
        if (p.intrinsic_dim != 2)
            fail(ErrorKind::parameter, "sphere atlases are built for d = 2");
        a.D = 3;
        a.d = 2;
        a.reach = 1.0;
        a.ambient_bound = 1.0;
        const double r = p.radius > 0.0 ? p.radius : a.reach / 4.0;
        for (auto& c : fibonacci_sphere(count)) {
            Matrix V = tangent_basis(c);
            a.charts.push_back(make_chart(std::move(c), r, std::move(V)));
        }
        break;
    }
    case ManifoldShape::flat_patch: {
        if (count != 1)
            fail(ErrorKind::parameter, "flat patch atlases use a single chart");
        a.d = p.intrinsic_dim;
        a.D = p.ambient_dim;
        if (a.d == 0 || a.D < a.d)
            fail(ErrorKind::parameter, "flat patch needs 1 <= d <= D");
        a.reach = std::numeric_limits<double>::infinity();
        const double r = p.radius > 0.0 ? p.radius : 0.5;
        // fixed tilted plane through a fixed origin
        a.origin.assign(a.D, 0.0);
        for (std::size_t j = 0; j < a.D; ++j)
            a.origin[j] = 0.1 * double(j + 1);
        std::vector<double> normal(a.D, 0.0);
        Matrix P(a.D, a.d);
        std::mt19937_64 rng(0xf1a7);
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t i = 0; i < a.d; ++i) {
            std::vector<double> v(a.D);
            for (auto& x : v)
                x = g(rng);
            for (std::size_t k = 0; k < i; ++k) {
                double dot = 0.0;
                for (std::size_t j = 0; j < a.D; ++j)
                    dot += P(j, k) * v[j];
                for (std::size_t j = 0; j < a.D; ++j)
                    v[j] -= dot * P(j, k);
            }
            const double len = norm(v);
            for (std::size_t j = 0; j < a.D; ++j)
                P(j, i) = v[j] / len;
        }
        a.plane = P;
        a.extent = 0.95 * r;
        double bound = 0.0;
        for (double o : a.origin)
            bound = std::max(bound, std::fabs(o) + a.extent);
        a.ambient_bound = bound;
        a.charts.push_back(make_chart(a.origin, r, P));
        break;
    }
    }
    validate_atlas(a, p.validation_samples);
    return a;
}

Atlas atlas_from_json(const nlohmann::json& spec) {
    AtlasParams p;
    p.radius = spec.value("radius", 0.0);
    p.intrinsic_dim = spec.value("intrinsic_dim", std::size_t(2));
    p.ambient_dim = spec.value("ambient_dim", std::size_t(3));
    p.cover_threshold = spec.value("cover_threshold", 1e-3);
    p.validation_samples = spec.value("validation_samples", std::size_t(4096));
    if (!spec.contains("shape") || !spec.contains("charts"))
        fail(ErrorKind::config, "atlas spec needs \"shape\" and \"charts\"");
    return make_atlas(shape_from_name(spec.at("shape").get<std::string>()), spec.at("charts").get<std::size_t>(), p);
}

void validate_atlas(const Atlas& a, std::size_t samples) {
    for (std::size_t n = 0; n < a.charts.size(); ++n) {
        const Chart& c = a.charts[n];
        if (c.center.size() != a.D || c.basis.rows() != a.D || c.basis.cols() != a.d || c.offset.size() != a.d)
            fail(ErrorKind::dimension, "chart " + std::to_string(n) + " has inconsistent shapes");
        for (std::size_t i = 0; i < a.d; ++i)
            for (std::size_t k = 0; k < a.d; ++k) {
                double dot = 0.0;
                for (std::size_t j = 0; j < a.D; ++j)
                    dot += c.basis(j, i) * c.basis(j, k);
                if (std::fabs(dot - (i == k ? 1.0 : 0.0)) > 1e-10)
                    fail(ErrorKind::parameter, "chart " + std::to_string(n) + " basis is not orthonormal");
            }
        if (!(c.radius > 0.0) || c.radius > a.reach / 4.0 * (1.0 + 1e-12))
            fail(ErrorKind::parameter, "chart " + std::to_string(n) + " radius exceeds reach/4");
        if (!(c.scale > 0.0 && c.scale <= 1.0))
            fail(ErrorKind::parameter, "chart " + std::to_string(n) + " scale outside (0, 1]");
    }
    for (const auto& x : a.validation_points(samples)) {
        if (a.bump_sum(x) < a.cover_threshold)
            fail(ErrorKind::coverage, "sample " + point_str(x) + " is not covered by any chart");
        for (std::size_t n = 0; n < a.charts.size(); ++n) {
            if (a.bump(n, x) == 0.0)
                continue;
            for (double y : a.charts[n].project(x))
                if (y < -1e-12 || y > 1.0 + 1e-12)
                    fail(ErrorKind::parameter, "chart " + std::to_string(n) + " maps " + point_str(x) +
                                                   " outside the unit cube");
        }
    }
}

}  // namespace tfa
