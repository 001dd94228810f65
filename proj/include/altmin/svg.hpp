#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "altmin/core.hpp"

namespace altmin {

/// One named curve of an objective-vs-iteration plot. mark_at lists row
/// indices to highlight (perturbation events).
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> mark_at;
};

/// Deterministic SVG line plot; identical inputs produce identical bytes.
std::string render_line_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                             const std::string& y_label, bool log_x);

struct ContourSettings {
  double box = 2.5;      // plot window [-box, box]^2
  int grid = 201;        // samples per axis
  int levels = 12;       // level lines at value quantiles
};

/// Contour plot of a 2D scalar field with an overlaid trajectory.
/// mark_at lists trajectory indices to highlight.
std::string render_contour_plot(const std::function<double(double, double)>& field,
                                const ContourSettings& settings,
                                const std::vector<Vector>& trajectory,
                                const std::vector<std::size_t>& mark_at);

}  // namespace altmin
