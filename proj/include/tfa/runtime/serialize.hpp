// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <iosfwd>
#include <string>

#include "tfa/runtime/net.hpp"

namespace tfa {

// JSON document: {d_embd, l, D, R, U, positional, blocks:[{heads:[{Q,K,V}],
// ffn:{layers:[{W,b}]}}]} plus provenance and layout notes. Arrays are
// row-major; shapes are implied by d_embd, l and D except for ffn weights,
// which carry rows/cols.
std::string net_to_json(const TransformerNet& net, int indent = -1);
TransformerNet net_from_json(const std::string& text);

void save_net(const TransformerNet& net, const std::string& path);
TransformerNet load_net(const std::string& path);

}  // namespace tfa
