// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/id/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "tfa/error.hpp"
#include "tfa/simd/kernels.hpp"

namespace tfa {

// bounded max-heap on (squared distance, index)
struct KnnIndex::Best {
    std::size_t K;
    std::vector<std::pair<double, std::size_t>> heap;

    bool full() const { return heap.size() == K; }
    double worst() const { return heap.front().first; }
    void offer(double d2, std::size_t idx) {
        const std::pair<double, std::size_t> c{d2, idx};
        if (!full()) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end());
        }
    }
};

KnnIndex::KnnIndex(const PointCloud& cloud, bool force_brute) : n_(cloud.n), D_(cloud.D) {
    validate_cloud(cloud);
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0);
    if (!force_brute && n_ >= brute_force_limit) {
        nodes_.push_back(Node{0, n_, 0, 0, {}, {}});
        // build reads the cloud through cols_ laid out in the original order
        cols_.resize(n_ * D_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < D_; ++j)
                cols_[j * n_ + i] = cloud(i, j);
        build(0);
    }
    cols_.assign(n_ * D_, 0.0);
    for (std::size_t p = 0; p < n_; ++p)
        for (std::size_t j = 0; j < D_; ++j)
            cols_[j * n_ + p] = cloud(perm_[p], j);
    pos_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p)
        pos_[perm_[p]] = p;
    col_ptr_.resize(D_);
    for (std::size_t j = 0; j < D_; ++j)
        col_ptr_[j] = cols_.data() + j * n_;
}

void KnnIndex::build(std::size_t node) {
    const std::size_t lo = nodes_[node].lo, hi = nodes_[node].hi;
    std::vector<double> blo(D_, INFINITY), bhi(D_, -INFINITY);
    for (std::size_t p = lo; p < hi; ++p)
        for (std::size_t j = 0; j < D_; ++j) {
            const double v = cols_[j * n_ + perm_[p]];
            blo[j] = std::min(blo[j], v);
            bhi[j] = std::max(bhi[j], v);
        }
    std::size_t axis = 0;
    for (std::size_t j = 1; j < D_; ++j)
        if (bhi[j] - blo[j] > bhi[axis] - blo[axis])
            axis = j;
    const bool leaf = hi - lo <= leaf_size || bhi[axis] == blo[axis];
    nodes_[node].box_lo = std::move(blo);
    nodes_[node].box_hi = std::move(bhi);
    if (leaf)
        return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const double* col = cols_.data() + axis * n_;
    std::nth_element(perm_.begin() + std::ptrdiff_t(lo), perm_.begin() + std::ptrdiff_t(mid),
                     perm_.begin() + std::ptrdiff_t(hi), [&](std::size_t a, std::size_t b) {
                         return col[a] < col[b] || (col[a] == col[b] && a < b);
                     });
    const std::size_t l = nodes_.size();
    nodes_.push_back(Node{lo, mid, 0, 0, {}, {}});
    nodes_.push_back(Node{mid, hi, 0, 0, {}, {}});
    nodes_[node].left = l;
    nodes_[node].right = l + 1;
    build(l);
    build(l + 1);
}

void KnnIndex::scan_range(std::size_t lo, std::size_t hi, const double* q, std::size_t self, Best& best,
                          std::vector<double>& scratch) const {
    std::vector<const double*> cols(D_);
    for (std::size_t j = 0; j < D_; ++j)
        cols[j] = col_ptr_[j] + lo;
    scratch.resize(hi - lo);
    simd::active().squared_distances(q, cols.data(), D_, hi - lo, scratch.data());
    for (std::size_t p = lo; p < hi; ++p)
        if (perm_[p] != self)
            best.offer(scratch[p - lo], perm_[p]);
}

void KnnIndex::search(std::size_t node, const double* q, std::size_t self, Best& best,
                      std::vector<double>& scratch) const {
    const Node& nd = nodes_[node];
    if (nd.left == 0) {
        scan_range(nd.lo, nd.hi, q, self, best, scratch);
        return;
    }
    auto gap = [&](const Node& c) {
        double s = 0.0;
        for (std::size_t j = 0; j < D_; ++j) {
            const double g = q[j] < c.box_lo[j] ? c.box_lo[j] - q[j] : q[j] > c.box_hi[j] ? q[j] - c.box_hi[j] : 0.0;
            s += g * g;
        }
        return s;
    };
    std::size_t a = nd.left, b = nd.right;
    double ga = gap(nodes_[a]), gb = gap(nodes_[b]);
    if (gb < ga) {
        std::swap(a, b);
        std::swap(ga, gb);
    }
    if (!best.full() || ga <= best.worst())
        search(a, q, self, best, scratch);
    if (!best.full() || gb <= best.worst())
        search(b, q, self, best, scratch);
}

void KnnIndex::neighbors(std::size_t i, std::size_t K, std::vector<double>& dist,
                         std::vector<std::size_t>& index) const {
    if (i >= n_)
        fail(ErrorKind::parameter, "query index outside the cloud");
    if (K == 0 || K >= n_)
        fail(ErrorKind::insufficient_data, "need K < n (K=" + std::to_string(K) + ", n=" + std::to_string(n_) + ")");
    // the query in the permuted column layout
    std::vector<double> q(D_);
    const std::size_t pos = pos_[i];
    for (std::size_t j = 0; j < D_; ++j)
        q[j] = col_ptr_[j][pos];
    Best best{K, {}};
    best.heap.reserve(K);
    std::vector<double> scratch;
    if (nodes_.empty())
        scan_range(0, n_, q.data(), i, best, scratch);
    else
        search(0, q.data(), i, best, scratch);
    std::sort_heap(best.heap.begin(), best.heap.end());
    dist.resize(K);
    index.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        dist[k] = std::sqrt(best.heap[k].first);
        index[k] = best.heap[k].second;
    }
}

std::vector<double> KnnIndex::profile(std::size_t i, std::size_t K) const {
    std::vector<double> dist;
    std::vector<std::size_t> idx;
    neighbors(i, K, dist, idx);
    if (dist[0] < 1e-12)
        fail(ErrorKind::duplicate_point, "points " + std::to_string(i) + " and " + std::to_string(idx[0]) +
                                             " coincide; deduplicate the cloud first");
    return dist;
}

std::vector<double> knn_distance_profile(const PointCloud& cloud, std::size_t i, std::size_t K) {
    return KnnIndex(cloud).profile(i, K);
}

}  // namespace tfa
