// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/id/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "tfa/error.hpp"
#include "tfa/id/knn.hpp"

namespace tfa {

double mle_local_dim(std::span<const double> T) {
    const std::size_t K = T.size();
    if (K < 2)
        fail(ErrorKind::insufficient_data, "profile needs at least 2 distances");
    for (std::size_t j = 0; j < K; ++j) {
        if (!(T[j] > 0.0) || !std::isfinite(T[j]))
            fail(ErrorKind::domain, "profile distances must be positive and finite");
        if (j && T[j] < T[j - 1])
            fail(ErrorKind::domain, "profile must be nondecreasing");
    }
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < K; ++j)
        s += std::log(T[K - 1] / T[j]);
    s /= double(K - 1);
    if (s == 0.0)
        fail(ErrorKind::zero_denominator, "all neighbor distances are equal");
    return 1.0 / s;
}

Aggregation aggregation_from_name(const std::string& name) {
    if (name == "arithmetic" || name == "mean")
        return Aggregation::arithmetic;
    if (name == "harmonic")
        return Aggregation::harmonic;
    fail(ErrorKind::config, "unknown aggregation '" + name + "' (arithmetic, harmonic)");
}

const char* aggregation_name(Aggregation a) { return a == Aggregation::harmonic ? "harmonic" : "arithmetic"; }

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(p[i - 1], p[rng() % i]);
    return p;
}

std::vector<double> local_dimensions(const PointCloud& cloud, std::size_t K, unsigned threads) {
    const KnnIndex index(cloud);
    std::vector<double> out(cloud.n);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            out[i] = mle_local_dim(index.profile(i, K));
    };
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(cloud.n)));
    if (threads == 1) {
        work(0, cloud.n);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                work(cloud.n * t / threads, cloud.n * (t + 1) / threads);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

IdEstimate estimate_id(const PointCloud& cloud, const IdOptions& opt) {
    validate_cloud(cloud);
    if (opt.K < 2)
        fail(ErrorKind::parameter, "K must be at least 2");
    if (opt.batch_size < opt.K + 1)
        fail(ErrorKind::parameter, "batch size must exceed K");
    auto dd = deduplicate(cloud);
    const PointCloud& c = dd.cloud;
    if (c.n < opt.K + 1)
        fail(ErrorKind::insufficient_data, std::to_string(c.n) + " distinct points, need at least K+1 = " +
                                               std::to_string(opt.K + 1));
    std::vector<std::size_t> order(c.n);
    if (opt.shuffle)
        order = seeded_permutation(c.n, opt.seed);
    else
        std::iota(order.begin(), order.end(), 0);

    IdEstimate e;
    e.K = opt.K;
    e.batch_size = opt.batch_size;
    e.seed = opt.seed;
    e.n_deduped = dd.removed;
    e.aggregation = opt.aggregation;
    for (std::size_t lo = 0; lo < c.n; lo += opt.batch_size) {
        const std::size_t hi = std::min(c.n, lo + opt.batch_size);
        if (hi - lo < opt.K + 1)
            break;
        const PointCloud batch = subset(c, std::span(order).subspan(lo, hi - lo));
        const auto local = local_dimensions(batch, opt.K, opt.threads);
        double v = 0.0;
        if (opt.aggregation == Aggregation::arithmetic) {
            for (double m : local)
                v += m;
            v /= double(local.size());
        } else {
            for (double m : local)
                v += 1.0 / m;
            v = double(local.size()) / v;
        }
        e.per_batch.push_back(v);
        e.n_used += hi - lo;
    }
    e.value = std::accumulate(e.per_batch.begin(), e.per_batch.end(), 0.0) / double(e.per_batch.size());
    return e;
}

nlohmann::json to_json(const IdEstimate& e) {
    return {{"value", e.value},
            {"per_batch", e.per_batch},
            {"K", e.K},
            {"batch_size", e.batch_size},
            {"seed", e.seed},
            {"n_used", e.n_used},
            {"n_deduped", e.n_deduped},
            {"aggregation", aggregation_name(e.aggregation)}};
}

}  // namespace tfa
