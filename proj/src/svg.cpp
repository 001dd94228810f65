#include "altmin/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace altmin {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 20;
constexpr int kMarginBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.04 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

class SvgBuilder {
 public:
  SvgBuilder() {
    append("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n");
    append("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  }
  void append(const std::string& s) { body_ += s; }
  std::string finish() { return body_ + "</svg>\n"; }

 private:
  std::string body_;
};

void draw_frame(SvgBuilder& svg, const Range& rx, const Range& ry, const std::string& x_label,
                const std::string& y_label) {
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  svg.append("<rect x=\"" + std::to_string(x0) + "\" y=\"" + std::to_string(y1) + "\" width=\"" +
             std::to_string(x1 - x0) + "\" height=\"" + std::to_string(y0 - y1) +
             "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n");
  svg.append("<text x=\"" + std::to_string((x0 + x1) / 2) + "\" y=\"" +
             std::to_string(kHeight - 12) +
             "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + x_label +
             "</text>\n");
  svg.append("<text x=\"16\" y=\"" + std::to_string((y0 + y1) / 2) +
             "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
             "transform=\"rotate(-90 16 " +
             std::to_string((y0 + y1) / 2) + ")\">" + y_label + "</text>\n");
  // corner tick labels
  svg.append("<text x=\"" + std::to_string(x0) + "\" y=\"" + std::to_string(y0 + 16) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + num(rx.lo) + "</text>\n");
  svg.append("<text x=\"" + std::to_string(x1) + "\" y=\"" + std::to_string(y0 + 16) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + num(rx.hi) +
             "</text>\n");
  svg.append("<text x=\"" + std::to_string(x0 - 4) + "\" y=\"" + std::to_string(y0) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + num(ry.lo) +
             "</text>\n");
  svg.append("<text x=\"" + std::to_string(x0 - 4) + "\" y=\"" + std::to_string(y1 + 10) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + num(ry.hi) +
             "</text>\n");
}

double map_x(double v, const Range& r) {
  return kMarginLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginLeft - kMarginRight);
}
double map_y(double v, const Range& r) {
  return (kHeight - kMarginBottom) -
         (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                             const std::string& y_label, bool log_x) {
  if (series.empty()) throw UsageError("render_line_plot: no series");
  for (const auto& s : series)
    if (s.x.empty() || s.x.size() != s.y.size())
      throw UsageError("render_line_plot: series '" + s.label + "' is empty or ragged");

  auto xval = [&](double v) { return log_x ? std::log10(v + 1.0) : v; };

  Range rx, ry;
  rx.lo = ry.lo = std::numeric_limits<double>::infinity();
  rx.hi = ry.hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rx.include(xval(s.x[i]));
      ry.include(s.y[i]);
    }
  rx.pad();
  ry.pad();

  SvgBuilder svg;
  draw_frame(svg, rx, ry, log_x ? x_label + " (log10(1+t))" : x_label, y_label);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    // Long traces are strided to keep files small; endpoints always kept.
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      pts += num(map_x(xval(s.x[i]), rx)) + "," + num(map_y(s.y[i], ry)) + " ";
    }
    if ((s.x.size() - 1) % stride != 0)
      pts += num(map_x(xval(s.x.back()), rx)) + "," + num(map_y(s.y.back(), ry)) + " ";
    svg.append("<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n");
    for (std::size_t idx : s.mark_at) {
      if (idx >= s.x.size()) continue;
      svg.append("<circle cx=\"" + num(map_x(xval(s.x[idx]), rx)) + "\" cy=\"" +
                 num(map_y(s.y[idx], ry)) + "\" r=\"3.5\" fill=\"none\" stroke=\"" +
                 std::string(color) + "\" stroke-width=\"1.2\"/>\n");
    }
    // legend
    const int ly = kMarginTop + 16 + static_cast<int>(si) * 16;
    svg.append("<line x1=\"" + std::to_string(kWidth - 170) + "\" y1=\"" + std::to_string(ly) +
               "\" x2=\"" + std::to_string(kWidth - 146) + "\" y2=\"" + std::to_string(ly) +
               "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"/>\n");
    svg.append("<text x=\"" + std::to_string(kWidth - 140) + "\" y=\"" + std::to_string(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n");
  }
  return svg.finish();
}

std::string render_contour_plot(const std::function<double(double, double)>& field,
                                const ContourSettings& settings,
                                const std::vector<Vector>& trajectory,
                                const std::vector<std::size_t>& mark_at) {
  const int n = settings.grid;
  if (n < 2) throw UsageError("render_contour_plot: grid must be >= 2");
  const double b = settings.box;
  Range rx, ry;
  rx.lo = ry.lo = -b;
  rx.hi = ry.hi = b;

  std::vector<double> values(static_cast<std::size_t>(n) * n);
  auto coord = [&](int i) { return -b + 2.0 * b * i / (n - 1); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) values[j * n + i] = field(coord(i), coord(j));

  // Level lines at value quantiles of the sampled grid.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> levels;
  for (int k = 0; k < settings.levels; ++k) {
    const double q = (k + 0.5) / settings.levels;
    levels.push_back(sorted[static_cast<std::size_t>(q * (sorted.size() - 1))]);
  }

  SvgBuilder svg;
  draw_frame(svg, rx, ry, "x1", "x2");

  // Marching squares, one short segment per crossed cell edge pair.
  auto interp = [&](double va, double vb, double a, double bcoord, double level) {
    const double t = (level - va) / (vb - va);
    return a + t * (bcoord - a);
  };
  std::string segs;
  for (double level : levels) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        const double v00 = values[j * n + i], v10 = values[j * n + i + 1];
        const double v01 = values[(j + 1) * n + i], v11 = values[(j + 1) * n + i + 1];
        const double x0 = coord(i), x1c = coord(i + 1);
        const double y0 = coord(j), y1c = coord(j + 1);
        int mask = 0;
        if (v00 >= level) mask |= 1;
        if (v10 >= level) mask |= 2;
        if (v11 >= level) mask |= 4;
        if (v01 >= level) mask |= 8;
        if (mask == 0 || mask == 15) continue;
        // edge crossings: bottom, right, top, left
        double ex[4], ey[4];
        bool has[4] = {false, false, false, false};
        if ((mask & 1) != ((mask >> 1) & 1)) {
          ex[0] = interp(v00, v10, x0, x1c, level);
          ey[0] = y0;
          has[0] = true;
        }
        if (((mask >> 1) & 1) != ((mask >> 2) & 1)) {
          ex[1] = x1c;
          ey[1] = interp(v10, v11, y0, y1c, level);
          has[1] = true;
        }
        if (((mask >> 3) & 1) != ((mask >> 2) & 1)) {
          ex[2] = interp(v01, v11, x0, x1c, level);
          ey[2] = y1c;
          has[2] = true;
        }
        if ((mask & 1) != ((mask >> 3) & 1)) {
          ex[3] = x0;
          ey[3] = interp(v00, v01, y0, y1c, level);
          has[3] = true;
        }
        int pts[4], np = 0;
        for (int e = 0; e < 4; ++e)
          if (has[e]) pts[np++] = e;
        // Two crossings: one segment. Four (saddle cell): pair 0-1 and 2-3.
        for (int s = 0; s + 1 < np; s += 2) {
          segs += "M" + num(map_x(ex[pts[s]], rx)) + " " + num(map_y(ey[pts[s]], ry)) + "L" +
                  num(map_x(ex[pts[s + 1]], rx)) + " " + num(map_y(ey[pts[s + 1]], ry));
        }
      }
    }
  }
  svg.append("<path d=\"" + segs + "\" fill=\"none\" stroke=\"#9ec2dd\" stroke-width=\"0.8\"/>\n");

  if (!trajectory.empty()) {
    std::string pts;
    for (const auto& q : trajectory) {
      if (q.size() != 2) throw UsageError("render_contour_plot: trajectory points must be 2D");
      pts += num(map_x(q[0], rx)) + "," + num(map_y(q[1], ry)) + " ";
    }
    svg.append("<polyline fill=\"none\" stroke=\"#e754a6\" stroke-width=\"1.6\" points=\"" + pts +
               "\"/>\n");
    svg.append("<circle cx=\"" + num(map_x(trajectory.front()[0], rx)) + "\" cy=\"" +
               num(map_y(trajectory.front()[1], ry)) +
               "\" r=\"4\" fill=\"#e754a6\"/>\n");
    for (std::size_t idx : mark_at) {
      if (idx >= trajectory.size()) continue;
      svg.append("<circle cx=\"" + num(map_x(trajectory[idx][0], rx)) + "\" cy=\"" +
                 num(map_y(trajectory[idx][1], ry)) +
                 "\" r=\"4\" fill=\"none\" stroke=\"#a1135c\" stroke-width=\"1.4\"/>\n");
    }
  }
  return svg.finish();
}

}  // namespace altmin
