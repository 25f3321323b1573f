// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/id/samplers.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "tfa/error.hpp"

namespace tfa {

std::size_t SamplerSpec::intrinsic_dim() const noexcept {
    return kind == SamplerKind::cube || kind == SamplerKind::sphere ? d : 2;
}

std::size_t SamplerSpec::native_dim() const noexcept {
    switch (kind) {
    case SamplerKind::cube:
        return d;
    case SamplerKind::sphere:
        return d + 1;
    default:
        return 3;
    }
}

std::string SamplerSpec::label() const {
    switch (kind) {
    case SamplerKind::cube:
        return "cube(" + std::to_string(d) + ")";
    case SamplerKind::sphere:
        return "sphere(" + std::to_string(d) + ")";
    case SamplerKind::swiss_roll:
        return "swiss_roll";
    case SamplerKind::torus:
        return "torus";
    }
    return "?";
}

SamplerSpec sampler_from_name(const std::string& name, std::size_t d) {
    SamplerSpec s;
    s.d = d;
    if (name == "cube")
        s.kind = SamplerKind::cube;
    else if (name == "sphere")
        s.kind = SamplerKind::sphere;
    else if (name == "swiss_roll")
        s.kind = SamplerKind::swiss_roll;
    else if (name == "torus")
        s.kind = SamplerKind::torus;
    else
        fail(ErrorKind::config, "unknown manifold sampler '" + name + "' (cube, sphere, swiss_roll, torus)");
    if (s.d == 0)
        fail(ErrorKind::parameter, "intrinsic dimension must be positive");
    return s;
}

PointCloud sample_native(const SamplerSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0)
        fail(ErrorKind::parameter, "sample count must be positive");
    PointCloud c(n, spec.native_dim(), spec.label());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    constexpr double pi = std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = c.point(i);
        switch (spec.kind) {
        case SamplerKind::cube:
            for (auto& v : x)
                v = u(rng);
            break;
        case SamplerKind::sphere: {
            double s = 0.0;
            do {
                s = 0.0;
                for (auto& v : x) {
                    v = g(rng);
                    s += v * v;
                }
            } while (s < 1e-24);
            s = std::sqrt(s);
            for (auto& v : x)
                v /= s;
            break;
        }
        case SamplerKind::swiss_roll: {
            const double t = 1.5 * pi * (1.0 + 2.0 * u(rng));
            x[0] = t * std::cos(t);
            x[1] = 21.0 * u(rng);
            x[2] = t * std::sin(t);
            break;
        }
        case SamplerKind::torus: {
            // ring radius 2, tube radius 1; rejection gives the uniform area measure
            double a = 0.0, b = 0.0;
            do {
                a = 2.0 * pi * u(rng);
                b = 2.0 * pi * u(rng);
            } while (3.0 * u(rng) > 2.0 + std::cos(b));
            x[0] = (2.0 + std::cos(b)) * std::cos(a);
            x[1] = (2.0 + std::cos(b)) * std::sin(a);
            x[2] = std::sin(b);
            break;
        }
        }
    }
    return c;
}

std::vector<double> random_orthonormal(std::size_t D, std::size_t k, std::uint64_t seed) {
    if (k > D)
        fail(ErrorKind::dimension, "cannot fit " + std::to_string(k) + " orthonormal columns in R^" + std::to_string(D));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> Q(D * k);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> v(D);
        double nrm = 0.0;
        do {
            for (auto& e : v)
                e = g(rng);
            // two passes of modified Gram-Schmidt
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t p = 0; p < c; ++p) {
                    double dot = 0.0;
                    for (std::size_t r = 0; r < D; ++r)
                        dot += Q[r * k + p] * v[r];
                    for (std::size_t r = 0; r < D; ++r)
                        v[r] -= dot * Q[r * k + p];
                }
            nrm = 0.0;
            for (double e : v)
                nrm += e * e;
            nrm = std::sqrt(nrm);
        } while (nrm < 1e-8);
        for (std::size_t r = 0; r < D; ++r)
            Q[r * k + c] = v[r] / nrm;
    }
    return Q;
}

PointCloud sample_synthetic_manifold(const SamplerSpec& spec, std::size_t n, std::size_t D, std::uint64_t seed) {
    const std::size_t k = spec.native_dim();
    if (D < k)
        fail(ErrorKind::dimension, spec.label() + " needs ambient dimension at least " + std::to_string(k) +
                                       ", got " + std::to_string(D));
    const PointCloud native = sample_native(spec, n, seed);
    // a separate stream for the embedding so samples do not depend on D
    const auto Q = random_orthonormal(D, k, seed ^ 0x9e3779b97f4a7c15ULL);
    PointCloud c(n, D, spec.label() + " in R^" + std::to_string(D));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < D; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                s += Q[r * k + j] * native(i, j);
            c(i, r) = s;
        }
    return c;
}

}  // namespace tfa
