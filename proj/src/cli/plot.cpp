// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "tfa/cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tfa/error.hpp"

namespace tfa {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<')
            o += "&lt;";
        else if (c == '>')
            o += "&gt;";
        else if (c == '&')
            o += "&amp;";
        else
            o += c;
    }
    return o;
}

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

double PlotFrame::tx(double x) const { return scale == PlotScale::loglog ? std::log10(x) : x; }
double PlotFrame::ty(double y) const { return scale == PlotScale::loglog ? std::log10(y) : y; }

double PlotFrame::px(double x) const {
    return left + (width - left - right) * (tx(x) - x_lo) / (x_hi - x_lo);
}

double PlotFrame::py(double y) const {
    return height - bottom - (height - top - bottom) * (ty(y) - y_lo) / (y_hi - y_lo);
}

PlotFrame plot_frame(const std::vector<Series>& series, PlotScale scale) {
    PlotFrame f;
    f.scale = scale;
    double xl = INFINITY, xh = -INFINITY, yl = INFINITY, yh = -INFINITY;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            fail(ErrorKind::dimension, "series '" + s.label + "' has mismatched x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                fail(ErrorKind::domain, "series '" + s.label + "' has a non-finite value");
            if (scale == PlotScale::loglog && !(s.x[i] > 0.0 && s.y[i] > 0.0))
                fail(ErrorKind::domain, "series '" + s.label + "' has a nonpositive value on a log-log plot");
            const double x = f.tx(s.x[i]), y = f.ty(s.y[i]);
            xl = std::min(xl, x);
            xh = std::max(xh, x);
            yl = std::min(yl, y);
            yh = std::max(yh, y);
        }
    }
    if (!(xl <= xh))
        fail(ErrorKind::insufficient_data, "nothing to plot");
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double p = span > 0.0 ? 0.05 * span : std::max(0.5, 0.05 * std::fabs(lo));
        lo -= p;
        hi += p;
    };
    pad(xl, xh);
    pad(yl, yh);
    f.x_lo = xl;
    f.x_hi = xh;
    f.y_lo = yl;
    f.y_hi = yh;
    return f;
}

std::string render_svg(const std::vector<Series>& series, PlotScale scale, const PlotLabels& labels) {
    const PlotFrame f = plot_frame(series, scale);
    const double W = PlotFrame::width, H = PlotFrame::height;
    const double x0 = PlotFrame::left, x1 = W - PlotFrame::right, y0 = PlotFrame::top, y1 = H - PlotFrame::bottom;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
      << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks at integer decades (loglog) or 5 even steps (linear)
    auto ticks = [&](double lo, double hi) {
        std::vector<double> t;
        if (scale == PlotScale::loglog) {
            for (double k = std::ceil(lo); k <= std::floor(hi); k += 1.0)
                t.push_back(k);
            if (t.empty())
                t = {lo, hi};
        } else {
            for (int k = 0; k <= 4; ++k)
                t.push_back(lo + (hi - lo) * k / 4.0);
        }
        return t;
    };
    auto label = [&](double t) { return scale == PlotScale::loglog ? "1e" + num(t) : num(t); };
    for (double t : ticks(f.x_lo, f.x_hi)) {
        const double p = x0 + (x1 - x0) * (t - f.x_lo) / (f.x_hi - f.x_lo);
        o << "<line x1=\"" << fmt(p) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(p) << "\" y2=\"" << fmt(y1 + 5)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(p) << "\" y=\"" << fmt(y1 + 18) << "\" text-anchor=\"middle\">" << label(t)
          << "</text>\n";
    }
    for (double t : ticks(f.y_lo, f.y_hi)) {
        const double p = y1 - (y1 - y0) * (t - f.y_lo) / (f.y_hi - f.y_lo);
        o << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(p) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(p)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(p + 4) << "\" text-anchor=\"end\">" << label(t)
          << "</text>\n";
    }
    if (!labels.title.empty())
        o << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
          << escape(labels.title) << "</text>\n";
    if (!labels.x.empty())
        o << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(H - 12) << "\" text-anchor=\"middle\">"
          << escape(labels.x) << "</text>\n";
    if (!labels.y.empty())
        o << "<text x=\"16\" y=\"" << fmt((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
          << fmt((y0 + y1) / 2) << ")\">" << escape(labels.y) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        if (s.line && !s.x.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o << (i ? " " : "") << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i]));
            o << "\"/>\n";
        }
        if (s.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o << "<circle cx=\"" << fmt(f.px(s.x[i])) << "\" cy=\"" << fmt(f.py(s.y[i])) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
        if (!s.label.empty())
            o << "<text x=\"" << fmt(x1 - 8) << "\" y=\"" << fmt(y0 + 16 + 16 * double(k)) << "\" text-anchor=\"end\" fill=\""
              << color << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_plot(const std::vector<Series>& series, PlotScale scale, const std::string& path, const PlotLabels& labels) {
    const std::string svg = render_svg(series, scale, labels);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::config, "cannot write " + path);
    out << svg;
}

}  // namespace tfa
