// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <vector>

namespace tfa {

struct Series {
    std::vector<double> x, y;
    std::string label;
    bool markers = true;  // one circle per point
    bool line = true;     // one polyline through the points
};

enum class PlotScale { loglog, linear };

struct PlotLabels {
    std::string title, x, y;
};

// Maps data to canvas pixels; in loglog mode through log10.
struct PlotFrame {
    static constexpr double width = 640, height = 480;
    static constexpr double left = 72, right = 24, top = 40, bottom = 56;

    PlotScale scale = PlotScale::loglog;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;  // transformed coordinates

    double tx(double x) const;  // data -> transformed
    double ty(double y) const;
    double px(double x) const;  // data -> pixels
    double py(double y) const;
};

PlotFrame plot_frame(const std::vector<Series>& series, PlotScale scale);
std::string render_svg(const std::vector<Series>& series, PlotScale scale, const PlotLabels& labels = {});
void emit_plot(const std::vector<Series>& series, PlotScale scale, const std::string& path,
               const PlotLabels& labels = {});

}  // namespace tfa
