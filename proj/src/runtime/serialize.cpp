// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/runtime/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tfa/error.hpp"

namespace tfa {
namespace {

using json = nlohmann::json;

json matrix_values(const Matrix& m) { return json(m.data()); }

Matrix read_matrix(const json& j, std::size_t rows, std::size_t cols, const char* what) {
    if (!j.is_array())
        fail(ErrorKind::dimension, std::string(what) + " must be an array");
    std::vector<double> v = j.get<std::vector<double>>();
    if (v.size() != rows * cols)
        fail(ErrorKind::dimension, std::string(what) + " has " + std::to_string(v.size()) + " entries, expected " +
                                       std::to_string(rows * cols));
    return Matrix(rows, cols, std::move(v));
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key))
        fail(ErrorKind::dimension, std::string("missing field '") + key + "'");
    return j.at(key).get<T>();
}

}  // namespace

std::string net_to_json(const TransformerNet& net, int indent) {
    json j;
    j["format"] = "tfapprox-net/1";
    j["d_embd"] = net.embed_dim;
    j["l"] = net.token_count;
    j["D"] = net.input_dim;
    j["R"] = net.output_clip;
    j["cancellation_scale"] = net.cancellation_scale;
    j["provenance"] = net.provenance;
    j["layout"] = net.layout;
    j["column_lift"] = net.column_lift;
    j["U"] = matrix_values(net.input_map);
    j["positional"] = matrix_values(net.positional);
    json blocks = json::array();
    for (const auto& b : net.blocks) {
        json jb;
        jb["provenance"] = b.provenance;
        json heads = json::array();
        for (const auto& h : b.heads) {
            json jh;
            jh["Q"] = matrix_values(h.Q);
            jh["K"] = matrix_values(h.K);
            jh["V"] = matrix_values(h.V);
            jh["C"] = h.cancellation;
            if (h.gate) {
                jh["gate"]["query"] = h.gate->query;
                if (h.gate->key)
                    jh["gate"]["key"] = *h.gate->key;
            }
            heads.push_back(std::move(jh));
        }
        jb["heads"] = std::move(heads);
        json layers = json::array();
        for (const auto& layer : b.ffn.layers) {
            json jl;
            jl["rows"] = layer.W.rows();
            jl["cols"] = layer.W.cols();
            jl["W"] = matrix_values(layer.W);
            jl["b"] = layer.b;
            layers.push_back(std::move(jl));
        }
        jb["ffn"]["layers"] = std::move(layers);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    return j.dump(indent);
}

TransformerNet net_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::input, std::string("net json: ") + e.what());
    }
    TransformerNet net;
    try {
        net.embed_dim = field<std::size_t>(j, "d_embd");
        net.token_count = field<std::size_t>(j, "l");
        net.input_dim = field<std::size_t>(j, "D");
        net.output_clip = field<double>(j, "R");
        net.cancellation_scale = j.value("cancellation_scale", 0.0);
        net.provenance = j.value("provenance", std::string());
        net.layout = j.value("layout", std::string());
        if (j.contains("column_lift"))
            net.column_lift = j["column_lift"].get<std::vector<double>>();
        else {
            net.column_lift.assign(net.embed_dim, 0.0);
            if (net.embed_dim)
                net.column_lift[0] = 1.0;
        }
        const std::size_t d = net.embed_dim;
        net.input_map = read_matrix(j.at("U"), net.token_count, net.input_dim, "U");
        net.positional = read_matrix(j.at("positional"), d, net.token_count, "positional");
        for (const auto& jb : j.at("blocks")) {
            TransformerBlock b;
            b.provenance = jb.value("provenance", std::string());
            for (const auto& jh : jb.at("heads")) {
                AttentionHead h;
                h.Q = read_matrix(jh.at("Q"), d, d, "Q");
                h.K = read_matrix(jh.at("K"), d, d, "K");
                h.V = read_matrix(jh.at("V"), d, d, "V");
                h.cancellation = jh.value("C", 0.0);
                if (jh.contains("gate")) {
                    HeadGate g;
                    g.query = jh["gate"].at("query").get<std::size_t>();
                    if (jh["gate"].contains("key"))
                        g.key = jh["gate"]["key"].get<std::size_t>();
                    if (g.query >= net.token_count || (g.key && *g.key >= net.token_count))
                        fail(ErrorKind::dimension, "head gate token out of range");
                    h.gate = g;
                }
                b.heads.push_back(std::move(h));
            }
            if (jb.contains("ffn")) {
                for (const auto& jl : jb["ffn"].at("layers")) {
                    FfnLayer layer;
                    auto rows = field<std::size_t>(jl, "rows");
                    auto cols = field<std::size_t>(jl, "cols");
                    layer.W = read_matrix(jl.at("W"), rows, cols, "W");
                    layer.b = jl.at("b").get<std::vector<double>>();
                    b.ffn.layers.push_back(std::move(layer));
                }
            }
            net.blocks.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::dimension, std::string("net json: ") + e.what());
    }
    validate_net(net);
    return net;
}

void save_net(const TransformerNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::config, "cannot write " + path);
    out << net_to_json(net) << '\n';
}

TransformerNet load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::config, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return net_from_json(ss.str());
}

}  // namespace tfa
