// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <optional>
#include <set>
#include <sstream>

#include "tfa/cli/plot.hpp"
#include "tfa/error.hpp"
#include "tfa/id/estimator.hpp"
#include "tfa/id/samplers.hpp"
#include "tfa/runtime/compiled.hpp"
#include "tfa/runtime/serialize.hpp"
#include "tfa/scaling/architecture.hpp"
#include "tfa/scaling/covering.hpp"
#include "tfa/scaling/exponents.hpp"
#include "tfa/scaling/fit.hpp"
#include "tfa/synthesis/cube.hpp"
#include "tfa/synthesis/grid.hpp"
#include "tfa/synthesis/manifold.hpp"
#include "tfa/synthesis/scan.hpp"

namespace tfa {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

double cancellation_tolerance(double C) { return std::max(1e-9, 10.0 * C * machine_eps); }

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Typed access to one JSON object; unknown keys are reported by finish().
class Config {
public:
    Config(json j, std::string where) : j_(std::move(j)), where_(std::move(where)) {
        if (!j_.is_object())
            fail(ErrorKind::config, where_ + " must be a JSON object");
    }

    bool has(const std::string& k) {
        used_.insert(k);
        return j_.contains(k);
    }

    template <class T>
    T get(const std::string& k, T fallback) {
        return has(k) ? convert<T>(k) : fallback;
    }

    template <class T>
    T need(const std::string& k) {
        if (!has(k))
            fail(ErrorKind::config, where_ + ": missing required key '" + k + "'");
        return convert<T>(k);
    }

    json raw(const std::string& k) {
        used_.insert(k);
        return j_.contains(k) ? j_.at(k) : json();
    }

    Config sub(const std::string& k) { return Config(need<json>(k), where_ + "." + k); }

    void finish() const {
        for (auto& [k, v] : j_.items())
            if (!used_.count(k))
                fail(ErrorKind::config, where_ + ": unknown key '" + k + "'");
    }

    const json& doc() const { return j_; }

private:
    template <class T>
    T convert(const std::string& k) {
        try {
            return j_.at(k).get<T>();
        } catch (const json::exception&) {
            fail(ErrorKind::config, where_ + ": key '" + k + "' has the wrong type");
        }
    }

    json j_;
    std::string where_;
    std::set<std::string> used_;
};

struct Report {
    json doc;
    bool pass = true;

    Report(const std::string& command, const json& inputs) {
        doc["command"] = command;
        doc["inputs"] = inputs;
        doc["info"] = json::object();
        doc["checks"] = json::array();
    }
    void info(const std::string& k, json v) { doc["info"][k] = std::move(v); }
    void at_most(const std::string& name, double value, double tolerance) {
        add(name, value, tolerance, "<=", value <= tolerance);
    }
    void within(const std::string& name, double value, double target, double tolerance) {
        add(name, value, json{{"target", target}, {"abs", tolerance}}, "|value-target|<=abs",
            std::fabs(value - target) <= tolerance);
    }
    void inside(const std::string& name, double value, double lo, double hi) {
        add(name, value, json::array({lo, hi}), "in", value >= lo && value <= hi);
    }
    void equal(const std::string& name, json value, json expected) {
        const bool ok = value == expected;
        add(name, std::move(value), std::move(expected), "==", ok);
    }

private:
    void add(const std::string& name, json value, json tolerance, const char* rel, bool ok) {
        doc["checks"].push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"relation", rel},
                                 {"pass", ok}});
        pass = pass && ok;
    }
};

struct Context {
    std::string command;
    const CommandOptions& opt;
    fs::path base;  // directory of the config file, for relative inputs
    fs::path out;
    std::ostream& cout;
    std::ostream& cerr;

    std::uint64_t seed(Config& c) const {
        if (opt.seed) {
            c.has("seed");
            return *opt.seed;
        }
        if (!c.has("seed"))
            fail(ErrorKind::config, command + ": a seed is required (config key 'seed' or --seed)");
        return c.need<std::uint64_t>("seed");
    }
    fs::path input(const std::string& p) const {
        const fs::path q(p);
        return q.is_absolute() ? q : base / q;
    }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream f(out / name, std::ios::binary);
        if (!f)
            fail(ErrorKind::config, "cannot write " + (out / name).string());
        f << text;
    }
};

int finish(const Context& ctx, Report& r) {
    r.doc["pass"] = r.pass;
    const std::string text = r.doc.dump(2) + "\n";
    ctx.write("report.json", text);
    ctx.cout << text;
    if (!r.pass) {
        for (const auto& c : r.doc["checks"])
            if (!c["pass"].get<bool>())
                ctx.cerr << "check failed: " << c["name"].get<std::string>() << " = " << c["value"].dump()
                         << " (" << c["relation"].get<std::string>() << " " << c["tolerance"].dump() << ")\n";
        return exit_check;
    }
    return exit_ok;
}

ScanOptions scan_options(Config& c, std::uint64_t seed, std::size_t d, unsigned threads, std::size_t budget) {
    ScanOptions s;
    s.seed = seed;
    s.threads = threads;
    s.budget = budget;
    // about 2e4 points whatever d is; in 1-D a step of 1/30000 lands on the
    // plateau edges of every N with N - 1 dividing 1000
    std::size_t res = d == 1 ? 30001 : std::max<std::size_t>(3, std::size_t(std::floor(std::pow(2e4, 1.0 / double(d)))));
    std::size_t random = 1000;
    if (c.has("scan")) {
        Config sc = c.sub("scan");
        res = sc.get<std::size_t>("resolution", res);
        random = sc.get<std::size_t>("random_points", random);
        sc.finish();
    }
    s.resolution = res;
    s.random_points = random;
    return s;
}

double net_oracle_gap(const CompiledNet& cn, const GridApprox& g, const std::vector<std::vector<double>>& pts) {
    auto ws = cn.make_workspace();
    double gap = 0.0;
    for (const auto& x : pts) {
        const double diff = std::fabs(cn.evaluate(x, *ws) - pou_oracle(g, x));
        gap = std::isnan(diff) ? INFINITY : std::max(gap, diff);
    }
    return gap;
}

struct CubeRun {
    std::size_t N = 0, l = 0, blocks = 0;
    double sup_error = 0.0, bound = 0.0, oracle_gap = 0.0, oracle_tol = 0.0, cancellation = 0.0;
    std::vector<double> argmax;
    ModelSize size;
    double kappa = 0.0;
    CompiledNet::Stats stats;
};

CubeRun run_cube(const HolderTarget& t, std::size_t d, std::size_t N, const ScanOptions& so, std::size_t budget,
                 std::size_t token_cap, std::ostream* csv, TransformerNet* keep) {
    const GridApprox g = build_grid(t, d, N, budget);
    TransformerNet net = synthesize_cube_approximator(g, {t.holder_constant, t.beta, t.sup_bound}, {token_cap});
    const CompiledNet cn(net);
    ScanOptions s = so;
    s.csv = csv;
    const ScanResult sr = sup_error_scan(compiled_evaluator(cn), t, d, s);
    CubeRun r;
    r.N = N;
    r.l = net.token_count;
    r.blocks = net.blocks.size();
    r.sup_error = sr.sup_error;
    r.argmax = sr.argmax;
    r.bound = cube_error_bound(d, N, t.holder_constant, t.beta);
    r.cancellation = net.cancellation_scale;
    r.oracle_tol = cancellation_tolerance(net.cancellation_scale);
    r.oracle_gap = net_oracle_gap(cn, g, scan_points(d, s));
    r.size = model_size(net);
    r.kappa = weight_sup_norm(net);
    {
        auto ws = cn.make_workspace();
        const std::vector<double> mid(d, 0.5);
        cn.evaluate(mid, *ws, &r.stats);
    }
    if (keep)
        *keep = std::move(net);
    return r;
}

json cube_run_json(const CubeRun& r) {
    return {{"N", r.N},
            {"l", r.l},
            {"blocks", r.blocks},
            {"sup_error", r.sup_error},
            {"argmax", r.argmax},
            {"bound", r.bound},
            {"net_oracle_gap", r.oracle_gap},
            {"cancellation_scale", r.cancellation},
            {"weight_sup_norm", r.kappa},
            {"model_size", r.size.formula},
            {"learnable", r.size.learnable},
            {"max_heads", r.size.max_heads},
            {"sparse_blocks", r.stats.sparse_blocks},
            {"dense_blocks", r.stats.dense_blocks}};
}

// ---------------------------------------------------------------- commands

int cmd_approx_build(Context& ctx, Config& c, Report& rep) {
    const std::size_t d = c.need<std::size_t>("d");
    const HolderTarget t = target_from_json(c.raw("target").is_null() ? json("linear") : c.raw("target"), d);
    const std::uint64_t seed = ctx.seed(c);
    const std::size_t budget = c.get<std::size_t>("budget", 10000000);
    const std::size_t cap = c.get<std::size_t>("token_cap", 1000000);
    const bool save = c.get<bool>("save_net", true);
    std::size_t N = 0;
    if (c.has("N"))
        N = c.need<std::size_t>("N");
    else if (c.has("eps"))
        N = choose_N(c.need<double>("eps"), d, t.holder_constant, t.beta);
    else
        fail(ErrorKind::config, "approx-build needs 'N' or 'eps'");
    const ScanOptions so = scan_options(c, seed, d, ctx.opt.threads, budget);
    std::optional<std::pair<double, double>> expect;
    if (c.has("expect_sup_error")) {
        Config e = c.sub("expect_sup_error");
        expect.emplace(e.need<double>("value"), e.need<double>("abs"));
        e.finish();
    }
    c.finish();

    std::ostringstream csv;
    TransformerNet net;
    const CubeRun r = run_cube(t, d, N, so, budget, cap, &csv, save ? &net : nullptr);
    ctx.write("scan.csv", csv.str());
    if (save)
        ctx.write("net.json", net_to_json(net) + "\n");
    const json summary = cube_run_json(r);
    for (auto& [k, v] : summary.items())
        rep.info(k, v);
    rep.at_most("sup_error_vs_target", r.sup_error, r.bound);
    rep.at_most("net_vs_oracle", r.oracle_gap, r.oracle_tol);
    rep.equal("block_count", r.blocks, cube_block_count(d));
    if (expect)
        rep.within("sup_error_expected", r.sup_error, expect->first, expect->second);
    return 0;
}

int cmd_approx_sweep(Context& ctx, Config& c, Report& rep) {
    const std::size_t d = c.need<std::size_t>("d");
    const HolderTarget t = target_from_json(c.raw("target").is_null() ? json("linear") : c.raw("target"), d);
    const std::uint64_t seed = ctx.seed(c);
    const std::size_t budget = c.get<std::size_t>("budget", 10000000);
    const std::size_t cap = c.get<std::size_t>("token_cap", 1000000);
    std::vector<std::size_t> Ns;
    json eps_list;
    if (c.has("N_values"))
        Ns = c.need<std::vector<std::size_t>>("N_values");
    else if (c.has("eps_values")) {
        for (double e : c.need<std::vector<double>>("eps_values")) {
            Ns.push_back(choose_N(e, d, t.holder_constant, t.beta));
            eps_list.push_back(e);
        }
    } else
        fail(ErrorKind::config, "approx-sweep needs 'N_values' or 'eps_values'");
    if (Ns.empty())
        fail(ErrorKind::config, "approx-sweep needs at least one sweep point");
    const double expected = c.get<double>("expected_slope", -t.beta / double(d));
    const double slope_tol = c.get<double>("slope_tolerance", 0.15);
    const ScanOptions so = scan_options(c, seed, d, ctx.opt.threads, budget);
    c.finish();

    std::vector<CubeRun> runs;
    std::ostringstream csv;
    csv << "N,l,blocks,sup_error,bound,net_oracle_gap\n";
    json rows = json::array();
    for (std::size_t k = 0; k < Ns.size(); ++k) {
        runs.push_back(run_cube(t, d, Ns[k], so, budget, cap, nullptr, nullptr));
        const auto& r = runs.back();
        csv << r.N << ',' << r.l << ',' << r.blocks << ',' << g17(r.sup_error) << ',' << g17(r.bound) << ','
            << g17(r.oracle_gap) << '\n';
        json row = cube_run_json(r);
        if (!eps_list.empty())
            row["eps"] = eps_list[k];
        rows.push_back(row);
        rep.at_most("sup_error_vs_bound[N=" + std::to_string(r.N) + "]", r.sup_error, r.bound);
        rep.at_most("net_vs_oracle[N=" + std::to_string(r.N) + "]", r.oracle_gap, r.oracle_tol);
    }
    ctx.write("sweep.csv", csv.str());
    rep.info("runs", rows);
    std::set<std::size_t> depths;
    for (const auto& r : runs)
        depths.insert(r.blocks);
    rep.equal("distinct_block_counts", depths.size(), 1);
    rep.equal("block_count", runs.front().blocks, cube_block_count(d));

    std::vector<LossPoint> pts;
    for (const auto& r : runs)
        pts.push_back({double(r.l), r.sup_error});
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.n < b.n; });
    Series data{{}, {}, "sup error", true, false};
    for (const auto& p : pts) {
        data.x.push_back(p.n);
        data.y.push_back(p.loss);
    }
    std::vector<Series> plot{data};
    if (pts.size() >= 3 && std::all_of(pts.begin(), pts.end(), [](auto& p) { return p.loss > 0.0; })) {
        const ScalingFit f = fit_power_law(pts, FitMode::plain);
        rep.info("fit", to_json(f));
        rep.within("slope_error_vs_tokens", -f.exponent, expected, slope_tol);
        Series line{{pts.front().n, pts.back().n}, {f.predict(pts.front().n), f.predict(pts.back().n)},
                    "fit slope " + g17(-f.exponent).substr(0, 7), false, true};
        plot.push_back(line);
    } else {
        rep.info("fit", "skipped: needs at least 3 positive errors");
    }
    if (std::all_of(pts.begin(), pts.end(), [](auto& p) { return p.loss > 0.0; }))
        emit_plot(plot, PlotScale::loglog, (ctx.out / "sweep.svg").string(),
                  {"sup error vs token count", "tokens l", "sup error"});
    return 0;
}

int cmd_manifold_demo(Context& ctx, Config& c, Report& rep) {
    const Atlas atlas = atlas_from_json(c.need<json>("atlas"));
    const HolderTarget t =
        target_from_json(c.raw("target").is_null() ? json("linear") : c.raw("target"), atlas.D);
    const double eps = c.need<double>("eps");
    const std::uint64_t seed = ctx.seed(c);
    const std::size_t samples = c.get<std::size_t>("samples", 10000);
    const std::size_t proj_points = c.get<std::size_t>("projection_points", 64);
    ManifoldOptions mo;
    mo.ramp_width = c.get<double>("ramp_width", 0.0);
    mo.token_cap = c.get<std::size_t>("token_cap", mo.token_cap);
    mo.grid_budget = c.get<std::size_t>("grid_budget", mo.grid_budget);
    c.finish();

    const ManifoldModel model = build_manifold_model(atlas, t, eps, mo);
    const ManifoldNet mn = synthesize_manifold_approximator(model, mo);
    const CompiledNet cn(mn.net);
    const auto pts = atlas.sample(samples, seed);

    double sup = 0.0, gap = 0.0;
    std::vector<double> arg;
    std::ostringstream csv;
    csv << "x" << (atlas.D > 1 ? "1" : "");
    for (std::size_t j = 2; j <= atlas.D; ++j)
        csv << ",x" << j;
    csv << ",f,approx,error\n";
    auto ws = cn.make_workspace();
    CompiledNet::Stats st;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double a = cn.evaluate(pts[k], *ws, k == 0 ? &st : nullptr);
        const double f = t(pts[k]);
        const double e = std::fabs(a - f);
        if (!(e <= sup)) {
            sup = std::isnan(e) ? INFINITY : e;
            arg = pts[k];
        }
        gap = std::max(gap, std::fabs(a - manifold_oracle(model, pts[k])));
        for (double v : pts[k])
            csv << g17(v) << ',';
        csv << g17(f) << ',' << g17(a) << ',' << g17(e) << '\n';
    }
    ctx.write("samples.csv", csv.str());

    double proj_err = 0.0, proj_C = 0.0;
    for (std::size_t n = 0; n < atlas.charts.size(); ++n) {
        std::vector<std::vector<double>> near;
        for (const auto& x : pts)
            if (near.size() < proj_points && atlas.bump(n, x) > 0.0)
                near.push_back(x);
        double C = 0.0;
        proj_err = std::max(proj_err, chart_projection_error(atlas.charts[n], atlas.D, atlas.ambient_bound, near, &C));
        proj_C = std::max(proj_C, C);
    }

    rep.info("charts", atlas.charts.size());
    rep.info("N", model.N);
    rep.info("chart_overlap", model.overlap);
    rep.info("delta1", model.delta1);
    rep.info("local_holder", model.local_holder);
    rep.info("ramp_width", model.ramp_width);
    rep.info("tokens", mn.net.token_count);
    rep.info("blocks", mn.net.blocks.size());
    rep.info("cancellation_scale", mn.net.cancellation_scale);
    rep.info("argmax", arg);
    rep.info("sparse_blocks", st.sparse_blocks);
    rep.info("layout", mn.net.layout);
    rep.at_most("sup_error_vs_target", sup, eps);
    rep.at_most("net_vs_oracle", gap, cancellation_tolerance(mn.net.cancellation_scale));
    rep.at_most("projection_vs_closed_form", proj_err, cancellation_tolerance(proj_C));
    return 0;
}

int cmd_estimate_id(Context& ctx, Config& c, Report& rep) {
    const fs::path path = ctx.input(c.need<std::string>("cloud"));
    IdOptions o;
    o.K = c.get<std::size_t>("K", 20);
    o.batch_size = c.get<std::size_t>("batch_size", 4096);
    o.seed = ctx.seed(c);
    o.aggregation = aggregation_from_name(c.get<std::string>("aggregation", "arithmetic"));
    o.threads = ctx.opt.threads;
    json expect = c.raw("expect");
    c.finish();

    PointCloud cloud = load_cloud_csv(path.string());
    cloud.provenance = path.filename().string();
    const IdEstimate e = estimate_id(cloud, o);
    if (e.n_deduped)
        ctx.cerr << "warning: removed " << e.n_deduped << " duplicate points\n";
    ctx.write("id.json", to_json(e).dump(2) + "\n");
    rep.info("estimate", to_json(e));
    rep.info("n", cloud.n);
    rep.info("D", cloud.D);
    if (expect.is_object()) {
        Config ex(expect, "expect");
        const double lo = ex.need<double>("lo"), hi = ex.need<double>("hi");
        ex.finish();
        rep.inside("id_estimate", e.value, lo, hi);
    }
    return 0;
}

int cmd_synth_cloud(Context& ctx, Config& c, Report& rep) {
    const SamplerSpec spec = sampler_from_name(c.need<std::string>("manifold"), c.get<std::size_t>("d", 2));
    const std::size_t n = c.need<std::size_t>("n");
    const std::size_t D = c.get<std::size_t>("D", spec.native_dim());
    const std::uint64_t seed = ctx.seed(c);
    const std::string file = c.get<std::string>("file", "cloud.csv");
    c.finish();
    const PointCloud cloud = sample_synthetic_manifold(spec, n, D, seed);
    std::ostringstream csv;
    write_cloud_csv(csv, cloud);
    ctx.write(file, csv.str());
    rep.info("file", file);
    rep.info("manifold", spec.label());
    rep.info("intrinsic_dim", spec.intrinsic_dim());
    rep.info("n", n);
    rep.info("D", D);
    return 0;
}

int cmd_fit_scaling(Context& ctx, Config& c, Report& rep) {
    const fs::path path = ctx.input(c.need<std::string>("data"));
    const FitMode mode = fit_mode_from_name(c.get<std::string>("mode", "plain"));
    const bool overlay = c.has("d");
    const double d = overlay ? c.need<double>("d") : 0.0;
    const double beta = c.get<double>("beta", 1.0);
    json expect = c.raw("expect");
    c.finish();

    const auto pts = load_loss_csv(path.string());
    const ScalingFit f = fit_power_law(pts, mode);
    ctx.write("fit.json", to_json(f).dump(2) + "\n");
    rep.info("fit", to_json(f));

    std::ostringstream csv;
    csv << "n,loss,fitted\n";
    Series data{{}, {}, "loss", true, false};
    for (const auto& p : pts) {
        csv << g17(p.n) << ',' << g17(p.loss) << ',' << g17(f.predict(p.n)) << '\n';
        data.x.push_back(p.n);
        data.y.push_back(p.loss);
    }
    ctx.write("fit_curve.csv", csv.str());
    std::vector<Series> plot{data};
    const double n0 = pts.front().n, n1 = pts.back().n;
    plot.push_back({{n0, n1}, {f.predict(n0), f.predict(n1)}, "fit", false, true});
    if (overlay) {
        const ExponentPrediction p = predict_exponents(d, beta);
        rep.info("predicted", {{"d", d}, {"beta", beta}, {"alpha_D", p.alpha_D}, {"alpha_N", p.alpha_N}});
        // anchored at the first fitted value
        const double a = f.predict(n0) - f.offset;
        plot.push_back({{n0, n1}, {a + f.offset, a * std::pow(n1 / n0, -p.alpha_D) + f.offset}, "predicted", false,
                        true});
    }
    emit_plot(plot, PlotScale::loglog, (ctx.out / "fit.svg").string(), {"loss vs data size", "n", "loss"});
    if (expect.is_object()) {
        Config ex(expect, "expect");
        const double v = ex.need<double>("exponent"), tol = ex.need<double>("tolerance");
        ex.finish();
        rep.within("exponent", f.exponent, v, tol);
    }
    return 0;
}

int cmd_predict(Context& ctx, Config& c, Report& rep) {
    const double d = c.need<double>("d");
    const double beta = c.get<double>("beta", 1.0);
    const double D = c.get<double>("D", 1.0);
    std::vector<double> ns = c.get<std::vector<double>>("n_values", {1e2, 1e3, 1e4, 1e5, 1e6});
    json conv = c.raw("convert");
    json arch = c.raw("architecture");
    c.finish();

    const ExponentPrediction p = predict_exponents(d, beta);
    rep.doc["alpha_D"] = p.alpha_D;
    rep.doc["alpha_N"] = p.alpha_N;
    rep.info("d", d);
    rep.info("beta", beta);
    const auto curve = generalization_rate_curve(d, beta, D, ns);
    json rc = json::array();
    std::ostringstream csv;
    csv << "n,rate\n";
    for (auto [n, r] : curve) {
        rc.push_back({n, r});
        csv << g17(n) << ',' << g17(r) << '\n';
    }
    ctx.write("rate.csv", csv.str());
    rep.info("rate_curve", {{"label", "rate, not calibrated loss"}, {"D", D}, {"points", rc}});
    if (conv.is_object()) {
        json out = json::object();
        for (auto& [k, v] : conv.items()) {
            if (!v.is_number())
                fail(ErrorKind::config, "convert." + k + " must be a number");
            const ExponentKind kind = exponent_kind_from_name(k);
            out[k == "alpha_N" || k == "N" ? "alpha_D" : "alpha_N"] = convert_exponents(kind, v.get<double>());
        }
        rep.info("converted", out);
    } else if (!conv.is_null()) {
        fail(ErrorKind::config, "convert must be an object such as {\"alpha_N\": 0.076}");
    }
    if (!arch.is_null()) {
        Config a(arch, "architecture");
        ArchRequest q;
        q.d = std::size_t(std::llround(d));
        if (std::fabs(d - double(q.d)) > 0.0)
            fail(ErrorKind::config, "architecture needs an integer d");
        q.beta = beta;
        const std::string mode = a.get<std::string>("mode", "approximation");
        if (mode == "approximation") {
            q.mode = ArchMode::approximation;
            q.eps = a.need<double>("eps");
        } else if (mode == "estimation") {
            q.mode = ArchMode::estimation;
            q.n = a.need<double>("n");
        } else {
            fail(ErrorKind::config, "architecture.mode must be approximation or estimation");
        }
        q.holder_constant = a.get<double>("holder_constant", 1.0);
        q.sup_bound = a.get<double>("sup_bound", 1.0);
        q.token_cap = a.get<std::size_t>("token_cap", q.token_cap);
        a.finish();
        rep.info("architecture", to_json(predicted_architecture(q)));
    }
    return 0;
}

int cmd_covering_bound(Context&, Config& c, Report& rep) {
    const ArchParams p = arch_from_json(c.has("params") ? c.need<json>("params") : json::object());
    c.finish();
    rep.doc["log_covering_number"] = log_covering_number(p);
    rep.info("prefactor", covering_prefactor(p));
    rep.info("params", to_json(p));
    return 0;
}

using Handler = int (*)(Context&, Config&, Report&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h = {
        {"approx-build", cmd_approx_build},   {"approx-sweep", cmd_approx_sweep}, {"manifold-demo", cmd_manifold_demo},
        {"estimate-id", cmd_estimate_id},     {"synth-cloud", cmd_synth_cloud},   {"fit-scaling", cmd_fit_scaling},
        {"predict", cmd_predict},             {"covering-bound", cmd_covering_bound}};
    return h;
}

json load_config(const CommandOptions& opt) {
    json j = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in)
            fail(ErrorKind::config, "cannot open config " + opt.config_path);
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::config, "config " + opt.config_path + " is not valid JSON: " + e.what());
        }
        if (!j.is_object())
            fail(ErrorKind::config, "config must be a JSON object");
    }
    if (!opt.overrides.is_null()) {
        if (!opt.overrides.is_object())
            fail(ErrorKind::config, "overrides must be a JSON object");
        j.merge_patch(opt.overrides);
    }
    return j;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (auto& [n, h] : handlers())
            v.push_back(n);
        return v;
    }();
    return names;
}

int run_command(const std::string& name, const CommandOptions& opt) {
    std::ostream& out = opt.out ? *opt.out : std::cout;
    std::ostream& err = opt.err ? *opt.err : std::cerr;
    try {
        const auto it = std::find_if(handlers().begin(), handlers().end(), [&](auto& h) { return h.first == name; });
        if (it == handlers().end())
            fail(ErrorKind::config, "unknown command '" + name + "'");
        json cfg = load_config(opt);
        std::string out_dir = opt.out_dir;
        if (out_dir.empty())
            if (const char* env = std::getenv("TFAPPROX_OUT"); env && *env)
                out_dir = env;
        if (cfg.contains("out")) {
            if (!cfg["out"].is_string())
                fail(ErrorKind::config, "out must be a string");
            if (out_dir.empty())
                out_dir = cfg["out"].get<std::string>();
            cfg.erase("out");
        }
        if (out_dir.empty())
            out_dir = "tfapprox-out";
        if (opt.seed)
            cfg["seed"] = *opt.seed;

        Context ctx{name, opt, opt.config_path.empty() ? fs::current_path() : fs::path(opt.config_path).parent_path(),
                    fs::path(out_dir), out, err};
        std::error_code ec;
        fs::create_directories(ctx.out, ec);
        if (ec)
            fail(ErrorKind::config, "cannot create output directory " + out_dir + ": " + ec.message());
        Config c(cfg, name);
        Report rep(name, cfg);
        it->second(ctx, c, rep);
        return finish(ctx, rep);
    } catch (const Error& e) {
        err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == ErrorKind::resource ? exit_resource : exit_config;
    } catch (const std::bad_alloc&) {
        err << "error (resource): out of memory\n";
        return exit_resource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
}

}  // namespace tfa
