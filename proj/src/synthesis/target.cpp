// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/target.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tfa/error.hpp"

namespace tfa {
namespace {

using nlohmann::json;

std::vector<double> vec_param(const json& p, const char* key, std::size_t dim, double fill) {
    if (!p.contains(key))
        return std::vector<double>(dim, fill);
    const json& v = p.at(key);
    if (v.is_number())
        return std::vector<double>(dim, v.get<double>());
    auto out = v.get<std::vector<double>>();
    if (out.size() != dim)
        fail(ErrorKind::config, std::string("parameter ") + key + " needs " + std::to_string(dim) + " entries");
    return out;
}

double num_param(const json& p, const char* key, double fallback) {
    return p.contains(key) ? p.at(key).get<double>() : fallback;
}

double norm2(std::span<const double> x, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - c[i]) * (x[i] - c[i]);
    return s;
}

// largest distance from c to a corner of [lo, hi]^d
double far_corner(const std::vector<double>& c, double lo, double hi) {
    double s = 0.0;
    for (double v : c) {
        double m = std::max(std::fabs(v - lo), std::fabs(v - hi));
        s += m * m;
    }
    return std::sqrt(s);
}

}  // namespace

const std::vector<std::string>& target_names() {
    static const std::vector<std::string> names = {"constant",      "linear", "product_of_sines",
                                                   "gaussian_bump", "radial", "polynomial"};
    return names;
}

HolderTarget make_target(const std::string& name, std::size_t dim, const json& params_in) {
    if (dim == 0)
        fail(ErrorKind::parameter, "target dimension must be positive");
    const json params = params_in.is_null() ? json::object() : params_in;
    HolderTarget t;
    t.name = name;
    t.dim = dim;
    t.params = params;
    if (params.contains("domain")) {
        auto dom = params.at("domain").get<std::vector<double>>();
        if (dom.size() != 2 || !(dom[0] < dom[1]))
            fail(ErrorKind::config, "domain must be [lo, hi] with lo < hi");
        t.domain_lo = dom[0];
        t.domain_hi = dom[1];
    }
    const double B = std::max(std::fabs(t.domain_lo), std::fabs(t.domain_hi));
    const double d = double(dim);

    if (name == "constant") {
        const double c = num_param(params, "value", 0.0);
        t.eval = [c](std::span<const double>) { return c; };
        t.holder_constant = 1e-12;
        t.sup_bound = std::max(std::fabs(c), 1e-12);
    } else if (name == "linear") {
        std::vector<double> a(dim, 0.0);
        a[0] = 1.0;
        if (params.contains("coefficients"))
            a = vec_param(params, "coefficients", dim, 0.0);
        const double b = num_param(params, "offset", 0.0);
        double l2 = 0.0, l1 = 0.0;
        for (double v : a) {
            l2 += v * v;
            l1 += std::fabs(v);
        }
        t.eval = [a, b](std::span<const double> x) {
            double s = b;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += a[i] * x[i];
            return s;
        };
        t.holder_constant = std::max(std::sqrt(l2), 1e-12);
        t.sup_bound = std::max(l1 * B + std::fabs(b), 1e-12);
    } else if (name == "product_of_sines") {
        const double w = num_param(params, "omega", std::numbers::pi);
        const double ph = num_param(params, "phase", 0.0);
        t.eval = [w, ph](std::span<const double> x) {
            double p = 1.0;
            for (double v : x)
                p *= std::sin(w * v + ph);
            return p;
        };
        t.holder_constant = std::max(std::fabs(w) * std::sqrt(d), 1e-12);
        t.sup_bound = 1.0;
    } else if (name == "gaussian_bump") {
        auto c = vec_param(params, "center", dim, 0.5);
        const double s = num_param(params, "width", 0.25);
        const double A = num_param(params, "amplitude", 1.0);
        if (!(s > 0.0))
            fail(ErrorKind::config, "gaussian width must be positive");
        t.eval = [c, s, A](std::span<const double> x) { return A * std::exp(-norm2(x, c) / (2.0 * s * s)); };
        t.holder_constant = std::max(std::fabs(A) / (s * std::sqrt(std::numbers::e)), 1e-12);
        t.sup_bound = std::max(std::fabs(A), 1e-12);
    } else if (name == "radial") {
        auto c = vec_param(params, "center", dim, 0.5);
        const double a = num_param(params, "scale", 1.0);
        const double beta = num_param(params, "beta", 1.0);
        if (!(beta > 0.0 && beta <= 1.0))
            fail(ErrorKind::config, "radial exponent must be in (0, 1]");
        t.eval = [c, a, beta](std::span<const double> x) { return a * std::pow(std::sqrt(norm2(x, c)), beta); };
        t.beta = beta;
        t.holder_constant = std::max(std::fabs(a), 1e-12);
        t.sup_bound = std::max(std::fabs(a) * std::pow(far_corner(c, t.domain_lo, t.domain_hi), beta), 1e-12);
    } else if (name == "polynomial") {
        if (!params.contains("terms"))
            fail(ErrorKind::config, "polynomial needs \"terms\": [[coef, [powers...]], ...]");
        struct Term {
            double coef;
            std::vector<unsigned> pw;
        };
        std::vector<Term> terms;
        for (const auto& item : params.at("terms")) {
            Term tm{item.at(0).get<double>(), item.at(1).get<std::vector<unsigned>>()};
            if (tm.pw.size() != dim)
                fail(ErrorKind::config, "polynomial term needs one power per coordinate");
            terms.push_back(std::move(tm));
        }
        t.eval = [terms](std::span<const double> x) {
            double s = 0.0;
            for (const auto& tm : terms) {
                double p = tm.coef;
                for (std::size_t i = 0; i < tm.pw.size(); ++i)
                    for (unsigned k = 0; k < tm.pw[i]; ++k)
                        p *= x[i];
                s += p;
            }
            return s;
        };
        double R = 0.0, g2 = 0.0;
        std::vector<double> grad(dim, 0.0);
        for (const auto& tm : terms) {
            double mag = std::fabs(tm.coef);
            unsigned total = 0;
            for (unsigned p : tm.pw)
                total += p;
            R += mag * std::pow(B, double(total));
            for (std::size_t i = 0; i < dim; ++i)
                if (tm.pw[i] > 0)
                    grad[i] += mag * tm.pw[i] * std::pow(B, double(total - 1));
        }
        for (double g : grad)
            g2 += g * g;
        t.holder_constant = std::max(std::sqrt(g2), 1e-12);
        t.sup_bound = std::max(R, 1e-12);
    } else {
        fail(ErrorKind::config, "unknown target \"" + name + "\"");
    }
    t.holder_constant = num_param(params, "holder_constant", t.holder_constant);
    t.sup_bound = num_param(params, "sup_bound", t.sup_bound);
    if (name != "radial")
        t.beta = num_param(params, "beta", t.beta);
    if (!(t.holder_constant > 0.0) || !(t.sup_bound > 0.0) || !(t.beta > 0.0 && t.beta <= 1.0))
        fail(ErrorKind::parameter, "target needs H_f > 0, R > 0 and beta in (0, 1]");
    spot_check_target(t, 10000, 0x5eed);
    return t;
}

HolderTarget target_from_json(const json& spec, std::size_t dim) {
    if (spec.is_string())
        return make_target(spec.get<std::string>(), dim);
    if (!spec.is_object() || !spec.contains("name"))
        fail(ErrorKind::config, "target spec needs a \"name\"");
    return make_target(spec.at("name").get<std::string>(), dim, spec.value("params", json::object()));
}

void spot_check_target(const HolderTarget& t, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(t.domain_lo, t.domain_hi);
    std::vector<double> x(t.dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& v : x)
            v = u(rng);
        const double f = t.eval(x);
        if (!std::isfinite(f) || std::fabs(f) > t.sup_bound * (1.0 + 1e-12))
            fail(ErrorKind::bound, "target " + t.name + " exceeds its sup bound " + std::to_string(t.sup_bound));
    }
}

}  // namespace tfa
