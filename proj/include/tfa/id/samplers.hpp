// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tfa/id/cloud.hpp"

namespace tfa {

enum class SamplerKind { cube, sphere, swiss_roll, torus };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::cube;
    std::size_t d = 2;  // cube, sphere; swiss roll and torus are 2-dimensional

    std::size_t intrinsic_dim() const noexcept;
    std::size_t native_dim() const noexcept;  // coordinates before embedding
    std::string label() const;
};

SamplerSpec sampler_from_name(const std::string& name, std::size_t d = 2);

// Samples in native coordinates: cube [0,1]^d, unit sphere S^d in R^{d+1},
// swiss roll and ring torus in R^3.
PointCloud sample_native(const SamplerSpec& spec, std::size_t n, std::uint64_t seed);

// D x k with orthonormal columns, row-major
std::vector<double> random_orthonormal(std::size_t D, std::size_t k, std::uint64_t seed);

// native samples pushed through a seeded orthonormal map into R^D
PointCloud sample_synthetic_manifold(const SamplerSpec& spec, std::size_t n, std::size_t D, std::uint64_t seed);

}  // namespace tfa
