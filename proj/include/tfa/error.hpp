// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <stdexcept>
#include <string>

namespace tfa {

enum class ErrorKind {
    dimension,
    input,
    overflow,
    parameter,
    bound,
    resource,
    coverage,
    domain,
    duplicate_point,
    insufficient_data,
    zero_denominator,
    unsupported_block,
    config,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// index of the block that produced a non-finite value
class OverflowError : public Error {
public:
    OverflowError(std::size_t block, const std::string& what)
        : Error(ErrorKind::overflow, what), block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace tfa
