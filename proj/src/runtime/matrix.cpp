// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/runtime/matrix.hpp"

#include <cmath>

#include "tfa/error.hpp"

namespace tfa {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::input: return "input";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::bound: return "bound";
    case ErrorKind::resource: return "resource";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::duplicate_point: return "duplicate_point";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::zero_denominator: return "zero_denominator";
    case ErrorKind::unsupported_block: return "unsupported_block";
    case ErrorKind::config: return "config";
    }
    return "unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols)
        fail(ErrorKind::dimension, "matrix data size does not match shape");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            fail(ErrorKind::dimension, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::fabs(v));
    return m;
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v))
            return false;
    return true;
}

bool Matrix::is_zero() const noexcept {
    for (double v : data_)
        if (v != 0.0)
            return false;
    return true;
}

}  // namespace tfa
