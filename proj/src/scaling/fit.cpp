// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/scaling/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "tfa/error.hpp"

namespace tfa {
namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        r2 += r * r;
    }
    f.rms = std::sqrt(r2 / n);
    return f;
}

}  // namespace

FitMode fit_mode_from_name(const std::string& name) {
    if (name == "plain")
        return FitMode::plain;
    if (name == "offset")
        return FitMode::offset;
    fail(ErrorKind::config, "unknown fit mode '" + name + "' (plain, offset)");
}

const char* fit_mode_name(FitMode m) { return m == FitMode::offset ? "offset" : "plain"; }

double ScalingFit::predict(double n) const { return offset + coefficient * std::pow(n, -exponent); }

ScalingFit fit_power_law(std::span<const LossPoint> pts, FitMode mode) {
    if (pts.size() < 3)
        fail(ErrorKind::insufficient_data, "power-law fit needs at least 3 points");
    double min_loss = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].n > 0.0) || !(pts[i].loss > 0.0) || !std::isfinite(pts[i].n) || !std::isfinite(pts[i].loss))
            fail(ErrorKind::domain, "point " + std::to_string(i) + ": n and loss must be positive and finite");
        if (i && !(pts[i].n > pts[i - 1].n))
            fail(ErrorKind::domain, "n must be strictly increasing");
        min_loss = std::min(min_loss, pts[i].loss);
    }
    std::vector<double> x(pts.size()), y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        x[i] = std::log(pts[i].n);

    auto fit_at = [&](double E, ScalingFit& out) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double v = pts[i].loss - E;
            if (!(v > 0.0))
                return false;
            y[i] = std::log(v);
        }
        const LineFit lf = ols(x, y);
        out.exponent = lf.slope == 0.0 ? 0.0 : -lf.slope;
        out.coefficient = std::exp(lf.intercept);
        out.offset = E;
        out.residual = lf.rms;
        return true;
    };

    ScalingFit best;
    best.points = pts.size();
    best.mode = mode;
    if (mode == FitMode::plain) {
        fit_at(0.0, best);
        return best;
    }
    bool found = false;
    for (std::size_t k = 0; k < offset_grid_size; ++k) {
        const double E = 0.99 * min_loss * double(k) / double(offset_grid_size - 1);
        ScalingFit f = best;
        if (!fit_at(E, f))
            continue;
        if (!found || f.residual < best.residual) {
            best = f;
            found = true;
        }
    }
    if (!found)
        fail(ErrorKind::domain, "no offset candidate leaves the losses positive");
    return best;
}

std::vector<LossPoint> read_loss_csv(std::istream& in) {
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r"), b = cell.find_last_not_of(" \t\r");
            out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
        }
        return out;
    };
    if (!std::getline(in, line))
        fail(ErrorKind::input, "loss csv is empty");
    const auto head = split(line);
    const auto ni = std::find(head.begin(), head.end(), "n"), li = std::find(head.begin(), head.end(), "loss");
    if (ni == head.end() || li == head.end())
        fail(ErrorKind::input, "loss csv header must name columns n and loss");
    const std::size_t cn = std::size_t(ni - head.begin()), cl = std::size_t(li - head.begin());
    std::vector<LossPoint> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto cells = split(line);
        if (cells.size() <= std::max(cn, cl))
            fail(ErrorKind::input, "loss csv line " + std::to_string(lineno) + " is short");
        LossPoint p;
        std::istringstream a(cells[cn]), b(cells[cl]);
        a.imbue(std::locale::classic());
        b.imbue(std::locale::classic());
        if (!(a >> p.n) || !(b >> p.loss))
            fail(ErrorKind::input, "loss csv line " + std::to_string(lineno) + ": not a number");
        pts.push_back(p);
    }
    return pts;
}

std::vector<LossPoint> load_loss_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::config, "cannot open loss csv " + path);
    return read_loss_csv(in);
}

nlohmann::json to_json(const ScalingFit& f) {
    return {{"exponent", f.exponent},   {"coefficient", f.coefficient}, {"offset", f.offset},
            {"residual", f.residual},   {"points", f.points},           {"mode", fit_mode_name(f.mode)}};
}

}  // namespace tfa
