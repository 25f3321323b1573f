// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/runtime/compiled.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "tfa/error.hpp"
#include "tfa/runtime/forward.hpp"

namespace tfa {

namespace {

constexpr std::size_t kD = 5;
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Same arithmetic as a dense linear map entry: ordered dot plus a zero bias.
inline double linear_entry(const double* w, const double* h) { return dot_ordered(w, h, kD) + 0.0; }

bool row_is(const Matrix& m, std::size_t r, std::initializer_list<double> expect) {
    std::size_t c = 0;
    for (double v : expect)
        if (m(r, c++) != v)
            return false;
    return true;
}

bool data_cols_zero(const Matrix& m, std::size_t r) { return m(r, 0) == 0.0 && m(r, 1) == 0.0; }

bool frame_cols_zero(const Matrix& m, std::size_t r) {
    return m(r, 2) == 0.0 && m(r, 3) == 0.0 && m(r, 4) == 0.0;
}

double frob2(const Matrix& m, std::size_t r0, std::size_t r1) {
    double s = 0.0;
    for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            s += m(r, c) * m(r, c);
    return s;
}

struct CsrLayer {
    std::vector<std::uint32_t> ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;
    std::vector<double> bias;
    bool relu = false;
};

}  // namespace

struct CompiledNet::GatedHead {
    std::uint32_t index = 0;
    std::uint32_t t1 = 0;
    std::uint32_t t2 = kNone;  // kNone: query-only gate, keys summed
    bool q_needs_active = false;
    bool k_needs_active = false;
    double qd[2][kD];
    double kd[2][kD];
    double vd[2][kD];
    double q_idle[2];
    double k_idle[2];
    double v_idle[2];
    double norm_product = 0.0;
    double margin = 0.0;
};

struct CompiledNet::BlockPlan {
    bool sparse = false;
    std::string reason;
    std::vector<GatedHead> heads;
    std::vector<std::uint64_t> always_mask;
    std::vector<std::uint32_t> trig_ptr;   // l + 1
    std::vector<std::uint32_t> trig_head;
    bool needs_sorted_keys = false;
    std::vector<CsrLayer> ffn;
    std::size_t ffn_width = 0;
    std::vector<std::uint32_t> ffn_always;
};

class CompiledNet::Workspace {
public:
    std::vector<double> d0, d1;
    std::vector<std::uint8_t> active;
    std::vector<std::uint32_t> active_list;
    std::vector<double> acc0, acc1;
    std::vector<std::uint8_t> touched;
    std::vector<std::uint32_t> touched_list;
    std::vector<std::uint64_t> fire;
    std::vector<std::uint8_t> ffn_mark;
    std::vector<std::uint32_t> ffn_list;
    std::vector<double> buf_a, buf_b;
    std::vector<std::uint32_t> sorted_keys;
};

double gate_max_off_target(const double* row, const std::vector<double>& frame, std::size_t l,
                           std::size_t target, bool brute) {
    auto value = [&](std::size_t t) {
        double h[kD] = {0.0, 0.0, frame[t], frame[l + t], frame[2 * l + t]};
        return linear_entry(row, h);
    };
    double best = -std::numeric_limits<double>::infinity();
    if (brute || l <= 64) {
        for (std::size_t t = 0; t < l; ++t)
            if (t != target)
                best = std::max(best, value(t));
        return best;
    }
    // a cos(theta) + b sin(theta) + e over increasing angles in [0, pi/2] is
    // unimodal or has its maximum at an end point.
    const double a = row[2], b = row[3], e = row[4];
    const double peak = std::atan2(b, a);
    std::size_t lo = 0, hi = l;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        double ang = std::atan2(frame[l + mid], frame[mid]);
        if (ang <= peak)
            lo = mid;
        else
            hi = mid;
    }
    const std::ptrdiff_t cands[] = {0, 1, std::ptrdiff_t(l) - 2, std::ptrdiff_t(l) - 1,
                                    std::ptrdiff_t(lo) - 1, std::ptrdiff_t(lo), std::ptrdiff_t(lo) + 1,
                                    std::ptrdiff_t(lo) + 2, std::ptrdiff_t(target) - 1,
                                    std::ptrdiff_t(target) + 1};
    for (std::ptrdiff_t c : cands)
        if (c >= 0 && c < std::ptrdiff_t(l) && std::size_t(c) != target)
            best = std::max(best, value(std::size_t(c)));
    return best + 16.0 * kEps * (std::fabs(a) + std::fabs(b) + std::fabs(e));
}

namespace {

bool frame_is_arc(const std::vector<double>& frame, std::size_t l) {
    double prev = -1.0;
    for (std::size_t t = 0; t < l; ++t) {
        double c = frame[t], s = frame[l + t];
        if (frame[2 * l + t] != 1.0 || std::fabs(c * c + s * s - 1.0) > 1e-12)
            return false;
        double ang = std::atan2(s, c);
        if (ang <= prev || ang < 0.0 || ang > 1.5707963267948966 + 1e-12)
            return false;
        prev = ang;
    }
    return true;
}

std::vector<CsrLayer> to_csr(const FeedForward& ffn) {
    std::vector<CsrLayer> out;
    for (std::size_t i = 0; i < ffn.layers.size(); ++i) {
        const auto& L = ffn.layers[i];
        CsrLayer c;
        c.ptr.push_back(0);
        for (std::size_t r = 0; r < L.W.rows(); ++r) {
            for (std::size_t k = 0; k < L.W.cols(); ++k)
                if (L.W(r, k) != 0.0) {
                    c.col.push_back(std::uint32_t(k));
                    c.val.push_back(L.W(r, k));
                }
            c.ptr.push_back(std::uint32_t(c.col.size()));
        }
        c.bias = L.b;
        c.relu = i + 1 < ffn.layers.size();
        out.push_back(std::move(c));
    }
    return out;
}

// Returns rows 1..2 of the ffn output for token input `in` (5 entries).
void csr_apply(const std::vector<CsrLayer>& layers, const double* in, double* a, double* b, double out[2]) {
    const double* src = in;
    double* dst = a;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& L = layers[li];
        const std::size_t rows = L.bias.size();
        const bool last = li + 1 == layers.size();
        const std::size_t nrows = last ? 2 : rows;
        for (std::size_t r = 0; r < nrows; ++r) {
            double acc = 0.0;
            for (std::uint32_t k = L.ptr[r]; k < L.ptr[r + 1]; ++k)
                acc = acc + L.val[k] * src[L.col[k]];
            acc = acc + L.bias[r];
            dst[r] = L.relu ? (acc < 0.0 ? 0.0 : acc) : acc;
        }
        src = dst;
        dst = (dst == a) ? b : a;
    }
    out[0] = src[0];
    out[1] = src[1];
}

}  // namespace

CompiledNet::CompiledNet(CompiledNet&&) noexcept = default;
CompiledNet& CompiledNet::operator=(CompiledNet&&) noexcept = default;
CompiledNet::~CompiledNet() = default;

CompiledNet::CompiledNet(const TransformerNet& net) : net_(&net) {
    validate_net(net);
    const std::size_t l = net.token_count;
    if (net.embed_dim != kD) {
        dense_reason_ = "d_embd is not 5";
        return;
    }
    if (l >= kNone) {
        dense_reason_ = "too many tokens";
        return;
    }
    frame_.assign(3 * l, 0.0);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t t = 0; t < l; ++t)
            frame_[r * l + t] = net.positional(r + 2, t);
    for (std::size_t t = 0; t < l; ++t) {
        double n2 = 0.0;
        for (std::size_t r = 0; r < 3; ++r)
            n2 += frame_[r * l + t] * frame_[r * l + t];
        frame_norm2_max_ = std::max(frame_norm2_max_, n2);
    }
    const bool arc = frame_is_arc(frame_, l);
    for (std::size_t t = 0; t < l; ++t) {
        bool seed = net.positional(0, t) != 0.0 || net.positional(1, t) != 0.0;
        for (std::size_t j = 0; j < net.input_dim && !seed; ++j)
            seed = net.input_map(t, j) != 0.0;
        if (seed)
            seeds_.push_back(std::uint32_t(t));
    }

    // Rows 3..5 must stay equal to the positional rows through every block.
    for (std::size_t b = 0; b < net.blocks.size(); ++b) {
        const auto& blk = net.blocks[b];
        for (const auto& h : blk.heads)
            for (std::size_t r = 2; r < kD; ++r)
                for (std::size_t c = 0; c < kD; ++c)
                    if (h.V(r, c) != 0.0) {
                        dense_reason_ = "block " + std::to_string(b) + " writes rows 3..5";
                        return;
                    }
        if (!blk.ffn.layers.empty()) {
            const auto& last = blk.ffn.layers.back();
            for (std::size_t r = 2; r < kD; ++r) {
                bool bad = last.b[r] != 0.0;
                for (std::size_t c = 0; c < last.W.cols(); ++c)
                    bad = bad || last.W(r, c) != 0.0;
                if (bad) {
                    dense_reason_ = "block " + std::to_string(b) + " ffn writes rows 3..5";
                    return;
                }
            }
        }
    }
    structured_ = true;

    plans_.resize(net.blocks.size());
    for (std::size_t b = 0; b < net.blocks.size(); ++b) {
        const auto& blk = net.blocks[b];
        BlockPlan& plan = plans_[b];
        plan.sparse = true;
        plan.heads.reserve(blk.heads.size());
        for (std::size_t j = 0; j < blk.heads.size() && plan.sparse; ++j) {
            const AttentionHead& h = blk.heads[j];
            auto reject = [&](const std::string& why) {
                plan.sparse = false;
                plan.reason = "head " + std::to_string(j) + ": " + why;
            };
            if (!h.gate) {
                reject("no gate");
                break;
            }
            const bool keyed = h.gate->key.has_value();
            if (!row_is(h.Q, 4, {0, 0, 0, 0, 0}) || !row_is(h.K, 4, {0, 0, 0, 0, 0}) ||
                !row_is(h.K, 2, {0, 0, 0, 0, 1}) || !data_cols_zero(h.Q, 2)) {
                reject("query gate layout");
                break;
            }
            if (keyed ? (!row_is(h.Q, 3, {0, 0, 0, 0, 1}) || !data_cols_zero(h.K, 3))
                      : (!row_is(h.Q, 3, {0, 0, 0, 0, 0}) || !row_is(h.K, 3, {0, 0, 0, 0, 0}))) {
                reject("key gate layout");
                break;
            }
            if (!arc && l > 4096) {
                reject("interaction rows are not an ordered arc");
                break;
            }
            GatedHead g;
            g.index = std::uint32_t(j);
            g.t1 = std::uint32_t(h.gate->query);
            g.t2 = keyed ? std::uint32_t(*h.gate->key) : kNone;
            auto gate_at = [&](const Matrix& m, std::size_t r, std::size_t t) {
                double hv[kD] = {0.0, 0.0, frame_[t], frame_[l + t], frame_[2 * l + t]};
                return linear_entry(m.row(r), hv);
            };
            if (gate_at(h.Q, 2, g.t1) != 0.0 || (keyed && gate_at(h.K, 3, g.t2) != 0.0)) {
                reject("gate is not zero on its target");
                break;
            }
            double mq = -gate_max_off_target(h.Q.row(2), frame_, l, g.t1, !arc);
            double mk = keyed ? -gate_max_off_target(h.K.row(3), frame_, l, g.t2, !arc)
                              : std::numeric_limits<double>::infinity();
            g.margin = std::min(mq, mk);
            if (!(g.margin > 0.0)) {
                reject("gate has no margin");
                break;
            }
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t c = 0; c < kD; ++c) {
                    g.qd[r][c] = h.Q(r, c);
                    g.kd[r][c] = h.K(r, c);
                    g.vd[r][c] = h.V(r, c);
                }
            g.q_needs_active = frame_cols_zero(h.Q, 0) && frame_cols_zero(h.Q, 1);
            g.k_needs_active = frame_cols_zero(h.K, 0) && frame_cols_zero(h.K, 1);
            g.norm_product = std::sqrt(frob2(h.Q, 0, 2)) * std::sqrt(frob2(h.K, 0, 2));
            {
                double hq[kD] = {0.0, 0.0, frame_[g.t1], frame_[l + g.t1], frame_[2 * l + g.t1]};
                g.q_idle[0] = linear_entry(g.qd[0], hq);
                g.q_idle[1] = linear_entry(g.qd[1], hq);
                if (keyed) {
                    double hk[kD] = {0.0, 0.0, frame_[g.t2], frame_[l + g.t2], frame_[2 * l + g.t2]};
                    for (std::size_t r = 0; r < 2; ++r) {
                        g.k_idle[r] = linear_entry(g.kd[r], hk);
                        g.v_idle[r] = linear_entry(g.vd[r], hk);
                    }
                } else {
                    g.k_idle[0] = g.k_idle[1] = g.v_idle[0] = g.v_idle[1] = 0.0;
                }
            }
            if (!keyed && g.k_needs_active)
                plan.needs_sorted_keys = true;
            plan.heads.push_back(g);
        }
        if (!plan.sparse) {
            plan.heads.clear();
            continue;
        }
        const std::size_t m = plan.heads.size();
        plan.always_mask.assign((m + 63) / 64, 0);
        std::vector<std::uint32_t> count(l + 1, 0);
        auto trigger_token = [&](const GatedHead& g) -> std::uint32_t {
            if (g.q_needs_active)
                return g.t1;
            if (g.t2 != kNone && g.k_needs_active)
                return g.t2;
            return kNone;
        };
        for (std::size_t i = 0; i < m; ++i) {
            std::uint32_t t = trigger_token(plan.heads[i]);
            if (t == kNone)
                plan.always_mask[i / 64] |= std::uint64_t(1) << (i % 64);
            else
                ++count[t + 1];
        }
        for (std::size_t t = 0; t < l; ++t)
            count[t + 1] += count[t];
        plan.trig_ptr = count;
        plan.trig_head.resize(plan.trig_ptr[l]);
        std::vector<std::uint32_t> fillpos(plan.trig_ptr.begin(), plan.trig_ptr.end() - 1);
        for (std::size_t i = 0; i < m; ++i) {
            std::uint32_t t = trigger_token(plan.heads[i]);
            if (t != kNone)
                plan.trig_head[fillpos[t]++] = std::uint32_t(i);
        }

        if (!blk.ffn.layers.empty()) {
            plan.ffn = to_csr(blk.ffn);
            plan.ffn_width = std::max<std::size_t>(kD, blk.ffn.width());
            std::vector<double> a(plan.ffn_width), bb(plan.ffn_width);
            bool reads_frame = false;
            for (std::size_t r = 0; r < blk.ffn.layers[0].W.rows(); ++r)
                reads_frame = reads_frame || !frame_cols_zero(blk.ffn.layers[0].W, r);
            double first[2] = {0, 0};
            for (std::size_t t = 0; t < l; ++t) {
                double out[2];
                if (reads_frame || t == 0) {
                    double in[kD] = {0.0, 0.0, frame_[t], frame_[l + t], frame_[2 * l + t]};
                    csr_apply(plan.ffn, in, a.data(), bb.data(), out);
                    if (t == 0) {
                        first[0] = out[0];
                        first[1] = out[1];
                    }
                } else {
                    out[0] = first[0];
                    out[1] = first[1];
                }
                if (out[0] != 0.0 || out[1] != 0.0)
                    plan.ffn_always.push_back(std::uint32_t(t));
            }
        }
    }
}

void CompiledNet::WorkspaceDeleter::operator()(Workspace* ws) const noexcept { delete ws; }

CompiledNet::WorkspacePtr CompiledNet::make_workspace() const {
    auto ws = std::make_unique<Workspace>();
    const std::size_t l = net_->token_count;
    ws->d0.assign(l, 0.0);
    ws->d1.assign(l, 0.0);
    ws->active.assign(l, 0);
    ws->acc0.assign(l, 0.0);
    ws->acc1.assign(l, 0.0);
    ws->touched.assign(l, 0);
    ws->ffn_mark.assign(l, 0);
    std::size_t mmax = 0, wmax = kD;
    for (const auto& p : plans_) {
        mmax = std::max(mmax, p.heads.size());
        wmax = std::max(wmax, p.ffn_width);
    }
    ws->fire.assign((mmax + 63) / 64, 0);
    ws->buf_a.assign(wmax, 0.0);
    ws->buf_b.assign(wmax, 0.0);
    return WorkspacePtr(ws.release());
}

void CompiledNet::run_dense_block(std::size_t b, Workspace& ws) const {
    const std::size_t l = net_->token_count;
    Matrix H(kD, l);
    for (std::size_t t = 0; t < l; ++t) {
        H(0, t) = ws.d0[t];
        H(1, t) = ws.d1[t];
        for (std::size_t r = 0; r < 3; ++r)
            H(r + 2, t) = frame_[r * l + t];
    }
    H = block_forward(net_->blocks[b], H);
    if (!H.all_finite())
        throw OverflowError(b, "non-finite value after block " + std::to_string(b));
    for (std::uint32_t t : ws.active_list)
        ws.active[t] = 0;
    ws.active_list.clear();
    for (std::size_t t = 0; t < l; ++t) {
        ws.d0[t] = H(0, t);
        ws.d1[t] = H(1, t);
        if (ws.d0[t] != 0.0 || ws.d1[t] != 0.0) {
            ws.active[t] = 1;
            ws.active_list.push_back(std::uint32_t(t));
        } else {
            ws.d0[t] = ws.d1[t] = 0.0;
        }
    }
}

void CompiledNet::run_sparse_block(std::size_t b, Workspace& ws, Stats* stats) const {
    const BlockPlan& plan = plans_[b];
    const std::size_t l = net_->token_count;
    const double* f0 = frame_.data();
    const double* f1 = frame_.data() + l;
    const double* f2 = frame_.data() + 2 * l;

    // norm certificate for every gated head
    double n2 = frame_norm2_max_;
    for (std::uint32_t t : ws.active_list)
        n2 = std::max(n2, ws.d0[t] * ws.d0[t] + ws.d1[t] * ws.d1[t] + f0[t] * f0[t] + f1[t] * f1[t] + f2[t] * f2[t]);
    n2 *= 1.0 + 1e-12;
    for (const auto& g : plan.heads)
        if (!(g.norm_product * n2 <= 0.5 * g.margin)) {
            if (stats)
                ++stats->certificate_fallbacks;
            run_dense_block(b, ws);
            if (stats)
                ++stats->dense_blocks;
            return;
        }

    // fire set in head order
    std::fill(ws.fire.begin(), ws.fire.begin() + plan.always_mask.size(), 0);
    std::copy(plan.always_mask.begin(), plan.always_mask.end(), ws.fire.begin());
    for (std::uint32_t t : ws.active_list)
        for (std::uint32_t k = plan.trig_ptr[t]; k < plan.trig_ptr[t + 1]; ++k) {
            std::uint32_t i = plan.trig_head[k];
            ws.fire[i / 64] |= std::uint64_t(1) << (i % 64);
        }
    if (plan.needs_sorted_keys) {
        ws.sorted_keys = ws.active_list;
        std::sort(ws.sorted_keys.begin(), ws.sorted_keys.end());
    }

    auto token = [&](std::uint32_t t, double h[kD]) {
        h[0] = ws.d0[t];
        h[1] = ws.d1[t];
        h[2] = f0[t];
        h[3] = f1[t];
        h[4] = f2[t];
    };
    auto contribute = [&](std::uint32_t t, double c0, double c1) {
        if (!ws.touched[t]) {
            ws.touched[t] = 1;
            ws.touched_list.push_back(t);
            ws.acc0[t] = c0;
            ws.acc1[t] = c1;
        } else {
            ws.acc0[t] = ws.acc0[t] + c0;
            ws.acc1[t] = ws.acc1[t] + c1;
        }
    };

    std::size_t evaluated = 0;
    for (std::size_t w = 0; w < plan.always_mask.size(); ++w) {
        std::uint64_t bits = ws.fire[w];
        while (bits) {
            const std::size_t i = w * 64 + std::size_t(std::countr_zero(bits));
            bits &= bits - 1;
            const GatedHead& g = plan.heads[i];
            const bool qa = ws.active[g.t1];
            if (g.q_needs_active && !qa)
                continue;
            double q0, q1;
            if (qa) {
                double h[kD];
                token(g.t1, h);
                q0 = linear_entry(g.qd[0], h);
                q1 = linear_entry(g.qd[1], h);
            } else {
                q0 = g.q_idle[0];
                q1 = g.q_idle[1];
            }
            ++evaluated;
            if (g.t2 != kNone) {
                const bool ka = ws.active[g.t2];
                if (g.k_needs_active && !ka)
                    continue;
                double k0, k1, v0, v1;
                if (ka) {
                    double h[kD];
                    token(g.t2, h);
                    k0 = linear_entry(g.kd[0], h);
                    k1 = linear_entry(g.kd[1], h);
                    v0 = linear_entry(g.vd[0], h);
                    v1 = linear_entry(g.vd[1], h);
                } else {
                    k0 = g.k_idle[0];
                    k1 = g.k_idle[1];
                    v0 = g.v_idle[0];
                    v1 = g.v_idle[1];
                }
                double s = q0 * k0 + q1 * k1;
                s = s < 0.0 ? 0.0 : s;
                if (s != 0.0)
                    contribute(g.t1, 0.0 + s * v0, 0.0 + s * v1);
            } else {
                double a0 = 0.0, a1 = 0.0;
                bool any = false;
                auto key = [&](std::uint32_t k) {
                    double h[kD];
                    token(k, h);
                    double s = q0 * linear_entry(g.kd[0], h) + q1 * linear_entry(g.kd[1], h);
                    if (s > 0.0) {
                        a0 = a0 + s * linear_entry(g.vd[0], h);
                        a1 = a1 + s * linear_entry(g.vd[1], h);
                        any = true;
                    }
                };
                if (g.k_needs_active) {
                    for (std::uint32_t k : ws.sorted_keys)
                        key(k);
                } else {
                    for (std::uint32_t k = 0; k < l; ++k)
                        key(k);
                }
                if (any)
                    contribute(g.t1, a0, a1);
            }
        }
    }
    if (stats)
        stats->heads_evaluated += evaluated;

    // residual: X = MHA(H) + H
    for (std::uint32_t t : ws.touched_list) {
        ws.touched[t] = 0;
        ws.d0[t] = ws.acc0[t] + ws.d0[t];
        ws.d1[t] = ws.acc1[t] + ws.d1[t];
        if (!ws.active[t]) {
            ws.active[t] = 1;
            ws.active_list.push_back(t);
        }
    }
    ws.touched_list.clear();

    if (!plan.ffn.empty()) {
        ws.ffn_list.clear();
        for (std::uint32_t t : ws.active_list) {
            ws.ffn_mark[t] = 1;
            ws.ffn_list.push_back(t);
        }
        for (std::uint32_t t : plan.ffn_always)
            if (!ws.ffn_mark[t]) {
                ws.ffn_mark[t] = 1;
                ws.ffn_list.push_back(t);
            }
        for (std::uint32_t t : ws.ffn_list) {
            ws.ffn_mark[t] = 0;
            double h[kD], y[2];
            token(t, h);
            csr_apply(plan.ffn, h, ws.buf_a.data(), ws.buf_b.data(), y);
            ws.d0[t] = y[0] + ws.d0[t];
            ws.d1[t] = y[1] + ws.d1[t];
            if (!ws.active[t]) {
                ws.active[t] = 1;
                ws.active_list.push_back(t);
            }
        }
        if (stats)
            stats->ffn_tokens += ws.ffn_list.size();
    }

    // drop tokens whose data returned to zero, check finiteness
    std::size_t keep = 0;
    for (std::uint32_t t : ws.active_list) {
        if (!std::isfinite(ws.d0[t]) || !std::isfinite(ws.d1[t]))
            throw OverflowError(b, "non-finite value after block " + std::to_string(b));
        if (ws.d0[t] != 0.0 || ws.d1[t] != 0.0) {
            ws.active_list[keep++] = t;
        } else {
            ws.active[t] = 0;
            ws.d0[t] = ws.d1[t] = 0.0;
        }
    }
    ws.active_list.resize(keep);
}

void CompiledNet::run(std::span<const double> x, Workspace& ws, Stats* stats) const {
    const TransformerNet& net = *net_;
    if (x.size() != net.input_dim)
        fail(ErrorKind::dimension, "input has length " + std::to_string(x.size()) + ", net expects " +
                                       std::to_string(net.input_dim));
    for (double v : x)
        if (!std::isfinite(v))
            fail(ErrorKind::input, "non-finite input");
    for (std::uint32_t t : ws.active_list) {
        ws.active[t] = 0;
        ws.d0[t] = ws.d1[t] = 0.0;
    }
    ws.active_list.clear();
    for (std::uint32_t t : seeds_) {
        double u = dot_ordered(net.input_map.row(t), x.data(), x.size());
        double a = net.positional(0, t) + net.column_lift[0] * u;
        double c = net.positional(1, t) + net.column_lift[1] * u;
        if (a != 0.0 || c != 0.0) {
            ws.d0[t] = a;
            ws.d1[t] = c;
            ws.active[t] = 1;
            ws.active_list.push_back(t);
        }
    }
    for (std::size_t b = 0; b < net.blocks.size(); ++b) {
        if (plans_[b].sparse) {
            run_sparse_block(b, ws, stats);
            if (stats)
                ++stats->sparse_blocks;
        } else {
            run_dense_block(b, ws);
            if (stats)
                ++stats->dense_blocks;
        }
    }
}

double CompiledNet::evaluate(std::span<const double> x, Workspace& ws, Stats* stats) const {
    if (!structured_)
        return net_forward(*net_, x);
    run(x, ws, stats);
    const std::size_t last = net_->token_count - 1;
    return std::clamp(ws.d0[last], -net_->output_clip, net_->output_clip);
}

double CompiledNet::evaluate(std::span<const double> x) const {
    if (!structured_)
        return net_forward(*net_, x);
    auto ws = make_workspace();
    return evaluate(x, *ws);
}

EmbeddingMatrix CompiledNet::hidden(std::span<const double> x) const {
    if (!structured_)
        return net_hidden(*net_, x);
    auto ws = make_workspace();
    run(x, *ws, nullptr);
    const std::size_t l = net_->token_count;
    Matrix H(kD, l);
    for (std::size_t t = 0; t < l; ++t) {
        H(0, t) = ws->d0[t];
        H(1, t) = ws->d1[t];
        for (std::size_t r = 0; r < 3; ++r)
            H(r + 2, t) = frame_[r * l + t];
    }
    return H;
}

}  // namespace tfa
