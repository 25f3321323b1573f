// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfa/id/cloud.hpp"

namespace tfa {

// m = [ (1/(K-1)) sum_{j<K} ln(T_K / T_j) ]^-1
double mle_local_dim(std::span<const double> profile);

enum class Aggregation { arithmetic, harmonic };
Aggregation aggregation_from_name(const std::string& name);
const char* aggregation_name(Aggregation a);

struct IdOptions {
    std::size_t K = 20;
    std::size_t batch_size = 4096;
    std::uint64_t seed = 0;
    Aggregation aggregation = Aggregation::arithmetic;  // within a batch
    bool shuffle = true;
    unsigned threads = 1;
};

struct IdEstimate {
    double value = 0.0;             // arithmetic mean of per_batch
    std::vector<double> per_batch;
    std::size_t K = 0, batch_size = 0;
    std::uint64_t seed = 0;
    std::size_t n_used = 0, n_deduped = 0;
    Aggregation aggregation = Aggregation::arithmetic;
};

// local estimate at every point of the cloud, neighbors taken within the cloud
std::vector<double> local_dimensions(const PointCloud& cloud, std::size_t K, unsigned threads = 1);

IdEstimate estimate_id(const PointCloud& cloud, const IdOptions& options = {});

nlohmann::json to_json(const IdEstimate& e);

// Fisher-Yates driven by a 64-bit Mersenne twister
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace tfa
