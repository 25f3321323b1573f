// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tfa {

// n x D, row-major
struct PointCloud {
    std::size_t n = 0, D = 0;
    std::vector<double> data;
    std::string provenance;

    PointCloud() = default;
    PointCloud(std::size_t n, std::size_t D, std::string provenance = {});

    std::span<const double> point(std::size_t i) const { return {data.data() + i * D, D}; }
    std::span<double> point(std::size_t i) { return {data.data() + i * D, D}; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * D + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * D + j]; }
};

// n >= 2, finite entries, consistent storage
void validate_cloud(const PointCloud& cloud);

PointCloud subset(const PointCloud& cloud, std::span<const std::size_t> rows);

// Headerless CSV, one point per row, '.' as decimal point regardless of locale.
PointCloud read_cloud_csv(std::istream& in, const std::string& provenance = "csv");
PointCloud load_cloud_csv(const std::string& path);
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

struct DedupResult {
    PointCloud cloud;
    std::size_t removed = 0;
};
// Drops every point within tol (Euclidean) of an earlier kept point; order kept.
DedupResult deduplicate(const PointCloud& cloud, double tol = 1e-12);

}  // namespace tfa
