// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/synthesis/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <thread>

#include "tfa/error.hpp"
#include "tfa/synthesis/grid.hpp"

namespace tfa {

std::vector<std::vector<double>> scan_points(std::size_t d, const ScanOptions& opt) {
    if (d == 0)
        fail(ErrorKind::parameter, "scan dimension must be positive");
    if (opt.resolution < 2)
        fail(ErrorKind::parameter, "scan resolution must be at least 2");
    const std::size_t grid = checked_power(opt.resolution, d, opt.budget);
    if (grid > opt.budget || grid + opt.random_points > opt.budget)
        fail(ErrorKind::resource, "scan needs more than " + std::to_string(opt.budget) + " evaluations");
    std::vector<std::vector<double>> pts;
    pts.reserve(grid + opt.random_points);
    std::vector<std::size_t> k(d, 0);
    for (std::size_t p = 0; p < grid; ++p) {
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i)
            x[i] = double(k[i]) / double(opt.resolution - 1);
        pts.push_back(std::move(x));
        for (std::size_t a = d; a-- > 0;) {
            if (++k[a] < opt.resolution)
                break;
            k[a] = 0;
        }
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t r = 0; r < opt.random_points; ++r) {
        std::vector<double> x(d);
        for (auto& v : x)
            v = u(rng);
        pts.push_back(std::move(x));
    }
    return pts;
}

ScanResult sup_error_scan(const EvaluatorFactory& make_eval, const HolderTarget& target, std::size_t d,
                          const ScanOptions& opt) {
    const auto pts = scan_points(d, opt);
    const std::size_t n = pts.size();
    std::vector<double> approx(n), exact(n);
    const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, unsigned(n)));
    auto work = [&](std::size_t lo, std::size_t hi) {
        ScalarField eval = make_eval();
        for (std::size_t i = lo; i < hi; ++i) {
            approx[i] = eval(pts[i]);
            exact[i] = target(pts[i]);
        }
    };
    if (threads == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, n * t / threads, n * (t + 1) / threads);
        for (auto& th : pool)
            th.join();
    }
    ScanResult res;
    res.points = n;
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = std::fabs(approx[i] - exact[i]);
        if (std::isnan(e))
            e = std::numeric_limits<double>::infinity();
        if (i == 0 || e > res.sup_error) {
            res.sup_error = e;
            best = i;
        }
    }
    res.argmax = pts[best];
    if (opt.csv) {
        std::ostream& os = *opt.csv;
        for (std::size_t i = 0; i < d; ++i)
            os << "x" << (i + 1) << ",";
        os << "f,approx,error\n";
        char buf[64];
        for (std::size_t i = 0; i < n; ++i) {
            for (double v : pts[i]) {
                std::snprintf(buf, sizeof buf, "%.17g,", v);
                os << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g,", exact[i]);
            os << buf;
            std::snprintf(buf, sizeof buf, "%.17g,", approx[i]);
            os << buf;
            std::snprintf(buf, sizeof buf, "%.17g\n", std::fabs(approx[i] - exact[i]));
            os << buf;
        }
    }
    return res;
}

ScanResult sup_error_scan(const ScalarField& eval, const HolderTarget& target, std::size_t d,
                          const ScanOptions& opt) {
    ScanOptions single = opt;
    single.threads = 1;
    return sup_error_scan([&eval]() { return eval; }, target, d, single);
}

EvaluatorFactory compiled_evaluator(const CompiledNet& net) {
    return [&net]() -> ScalarField {
        std::shared_ptr<CompiledNet::Workspace> ws = net.make_workspace();
        return [&net, ws](std::span<const double> x) { return net.evaluate(x, *ws); };
    };
}

}  // namespace tfa
