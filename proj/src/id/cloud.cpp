// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/id/cloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "tfa/error.hpp"

namespace tfa {

PointCloud::PointCloud(std::size_t n_, std::size_t D_, std::string prov)
    : n(n_), D(D_), data(n_ * D_, 0.0), provenance(std::move(prov)) {}

void validate_cloud(const PointCloud& c) {
    if (c.D == 0 || c.data.size() != c.n * c.D)
        fail(ErrorKind::dimension, "point cloud storage does not match n x D");
    if (c.n < 2)
        fail(ErrorKind::insufficient_data, "point cloud needs at least 2 points");
    for (std::size_t k = 0; k < c.data.size(); ++k)
        if (!std::isfinite(c.data[k]))
            fail(ErrorKind::input, "point " + std::to_string(k / c.D) + " has a non-finite coordinate");
}

PointCloud subset(const PointCloud& c, std::span<const std::size_t> rows) {
    PointCloud out(rows.size(), c.D, c.provenance);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy_n(c.data.begin() + std::ptrdiff_t(rows[r] * c.D), c.D, out.data.begin() + std::ptrdiff_t(r * c.D));
    return out;
}

PointCloud read_cloud_csv(std::istream& in, const std::string& provenance) {
    PointCloud c;
    c.provenance = provenance;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::size_t cols = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            while (p < end && (*p == ' ' || *p == '\t'))
                ++p;
            if (p < end && *p == '+')
                ++p;
            double v = 0.0;
            auto [q, ec] = std::from_chars(p, end, v);
            if (ec != std::errc())
                fail(ErrorKind::input, "line " + std::to_string(lineno) + ": not a number");
            p = q;
            while (p < end && (*p == ' ' || *p == '\t'))
                ++p;
            c.data.push_back(v);
            ++cols;
            if (p == end)
                break;
            if (*p != ',')
                fail(ErrorKind::input, "line " + std::to_string(lineno) + ": expected ','");
            ++p;
        }
        if (c.D == 0)
            c.D = cols;
        else if (cols != c.D)
            fail(ErrorKind::dimension, "line " + std::to_string(lineno) + " has " + std::to_string(cols) +
                                           " columns, expected " + std::to_string(c.D));
        ++c.n;
    }
    validate_cloud(c);
    return c;
}

PointCloud load_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::config, "cannot open point cloud " + path);
    return read_cloud_csv(in, path);
}

void write_cloud_csv(std::ostream& out, const PointCloud& c) {
    char buf[32];
    for (std::size_t i = 0; i < c.n; ++i) {
        for (std::size_t j = 0; j < c.D; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", c(i, j));
            if (j)
                out << ',';
            out << buf;
        }
        out << '\n';
    }
}

DedupResult deduplicate(const PointCloud& c, double tol) {
    // sweep along the first coordinate; only points within tol there can collide
    std::vector<std::size_t> order(c.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return c(a, 0) < c(b, 0); });
    std::vector<char> drop(c.n, 0);
    const double tol2 = tol * tol;
    for (std::size_t a = 0; a < c.n; ++a) {
        const std::size_t i = order[a];
        for (std::size_t b = a + 1; b < c.n && c(order[b], 0) - c(i, 0) <= tol; ++b) {
            const std::size_t j = order[b];
            double s = 0.0;
            for (std::size_t k = 0; k < c.D; ++k)
                s += (c(i, k) - c(j, k)) * (c(i, k) - c(j, k));
            if (s <= tol2) {
                // keep the earlier index unless it is already dropped
                const std::size_t lo = std::min(i, j), hi = std::max(i, j);
                if (!drop[lo])
                    drop[hi] = 1;
            }
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < c.n; ++i)
        if (!drop[i])
            keep.push_back(i);
    DedupResult r;
    r.removed = c.n - keep.size();
    r.cloud = subset(c, keep);
    return r;
}

}  // namespace tfa
