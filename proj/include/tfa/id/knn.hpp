// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <vector>

#include "tfa/id/cloud.hpp"

namespace tfa {

// Exact Euclidean neighbors. Clouds below brute_force_limit points are
// scanned directly; larger ones go through a kd-tree with small leaves.
// Ties are broken by point index.
class KnnIndex {
public:
    static constexpr std::size_t brute_force_limit = 1024;
    static constexpr std::size_t leaf_size = 32;

    explicit KnnIndex(const PointCloud& cloud, bool force_brute_force = false);

    // K nearest to point i, excluding i itself; ascending (distance, index)
    void neighbors(std::size_t i, std::size_t K, std::vector<double>& dist, std::vector<std::size_t>& index) const;
    // distances only; raises duplicate_point when one is below 1e-12
    std::vector<double> profile(std::size_t i, std::size_t K) const;

    bool uses_tree() const noexcept { return !nodes_.empty(); }
    std::size_t size() const noexcept { return n_; }

private:
    struct Node {
        std::size_t lo, hi;       // range in perm_
        std::size_t left, right;  // children, 0 for a leaf
        std::vector<double> box_lo, box_hi;
    };
    struct Best;

    void build(std::size_t node);
    void scan_range(std::size_t lo, std::size_t hi, const double* q, std::size_t self, Best& best,
                    std::vector<double>& scratch) const;
    void search(std::size_t node, const double* q, std::size_t self, Best& best, std::vector<double>& scratch) const;

    std::size_t n_ = 0, D_ = 0;
    std::vector<double> cols_;          // D x n column-major copy in perm_ order
    std::vector<const double*> col_ptr_;
    std::vector<std::size_t> perm_;     // position -> original index
    std::vector<std::size_t> pos_;      // original index -> position
    std::vector<Node> nodes_;
};

std::vector<double> knn_distance_profile(const PointCloud& cloud, std::size_t i, std::size_t K);

}  // namespace tfa
