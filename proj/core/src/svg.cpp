#include "forte/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "forte/error.hpp"

namespace forte::svg {
namespace {

constexpr int kMargin = 48;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi - lo; }
};

std::string header(int width, int height) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height);
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < sorted.size() ? sorted[i] + frac * (sorted[i + 1] - sorted[i]) : sorted[i];
}

}  // namespace

std::string scatter(const std::vector<ScatterPanel>& panels, int panel_size) {
  const int cell = panel_size + 2 * kMargin;
  std::string out = header(cell * static_cast<int>(std::max<std::size_t>(panels.size(), 1)), cell);
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& panel = panels[k];
    Range xr, yr;
    for (const auto& [x, y] : panel.points) {
      xr.add(x);
      yr.add(y);
    }
    if (panel.points.empty()) xr = yr = Range{0.0, 1.0};
    // One scale for both axes so shapes are not distorted.
    const double span = std::max({xr.span(), yr.span(), 1e-12});
    const double scale = panel_size / span;
    const double x0 = static_cast<double>(k) * cell + kMargin;
    const double y0 = kMargin + panel_size;
    const double cx = 0.5 * (xr.lo + xr.hi), cy = 0.5 * (yr.lo + yr.hi);
    auto px = [&](double x) { return x0 + panel_size / 2.0 + (x - cx) * scale; };
    auto py = [&](double y) { return y0 - panel_size / 2.0 - (y - cy) * scale; };

    out += fmt::format("<g>\n<rect x=\"{:.2f}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
                       x0, kMargin, panel_size, panel_size);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                       x0 + panel_size / 2.0, kMargin - 18, escape(panel.title));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x0 + panel_size / 2.0,
                       kMargin + panel_size + 30, escape(panel.x_label));
    out += fmt::format(
        "<text x=\"{0:.2f}\" y=\"{1:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 {0:.2f} {1:.2f})\">{2}</text>\n",
        x0 - 30, y0 - panel_size / 2.0, escape(panel.y_label));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"9\">x {:.0f}..{:.0f}, y {:.0f}..{:.0f}</text>\n",
                       x0 + 4, kMargin + 12, xr.lo, xr.hi, yr.lo, yr.hi);
    out += "<g fill=\"#1f77b4\" fill-opacity=\"0.35\">\n";
    for (const auto& [x, y] : panel.points) {
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1\"/>\n", px(x), py(y));
    }
    out += "</g>\n</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string workspace_projections(const WorkspaceCloud& cloud, std::size_t max_points) {
  const std::size_t stride = std::max<std::size_t>(1, (cloud.points.size() + max_points - 1) / std::max<std::size_t>(max_points, 1));
  ScatterPanel top{"Top view (XY)", "x [mm]", "y [mm]", {}};
  ScatterPanel side{"Side view (XZ)", "x [mm]", "z [mm]", {}};
  for (std::size_t i = 0; i < cloud.points.size(); i += stride) {
    const auto& p = cloud.points[i];
    top.points.emplace_back(p.x() * 1000.0, p.y() * 1000.0);
    side.points.emplace_back(p.x() * 1000.0, p.z() * 1000.0);
  }
  return scatter({top, side});
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "box plot series is empty");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  const double iqr = s.q3 - s.q1;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double v : values) {
    if (v >= s.q1 - 1.5 * iqr) s.whisker_low = std::min(s.whisker_low, v);
    if (v <= s.q3 + 1.5 * iqr) s.whisker_high = std::max(s.whisker_high, v);
  }
  return s;
}

std::string box_plot(const std::vector<BoxSeries>& series, const std::string& title, const std::string& y_label) {
  constexpr int kSlot = 80, kHeight = 320;
  const int width = 2 * kMargin + kSlot * static_cast<int>(std::max<std::size_t>(series.size(), 1));
  const int height = kHeight + 2 * kMargin;
  Range yr;
  std::vector<BoxStats> stats;
  for (const auto& s : series) {
    stats.push_back(box_stats(s.values));
    yr.add(stats.back().min);
    yr.add(stats.back().max);
  }
  if (series.empty()) yr = Range{0.0, 1.0};
  const double pad = std::max(yr.span() * 0.05, 1e-12);
  yr.lo -= pad;
  yr.hi += pad;
  auto py = [&](double v) { return kMargin + kHeight - (v - yr.lo) / yr.span() * kHeight; };

  std::string out = header(width, height);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n", width / 2,
                     kMargin - 18, escape(title));
  out += fmt::format(
      "<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>\n",
      kMargin + kHeight / 2, escape(y_label));
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>\n", kMargin, kMargin,
                     kMargin + kHeight);
  for (int t = 0; t <= 4; ++t) {
    const double v = yr.lo + yr.span() * t / 4.0;
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"9\">{:.3f}</text>\n",
                       kMargin - 4, py(v) + 3, v);
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = stats[i];
    const double cx = kMargin + kSlot * (static_cast<double>(i) + 0.5);
    const double half = kSlot * 0.3;
    out += "<g stroke=\"#333\" fill=\"none\">\n";
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", cx, py(s.whisker_high),
                       py(s.q3));
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", cx, py(s.q1),
                       py(s.whisker_low));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#aec7e8\"/>\n",
                       cx - half, py(s.q3), 2 * half, py(s.q1) - py(s.q3));
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{2:.2f}\" x2=\"{1:.2f}\" y2=\"{2:.2f}\" stroke-width=\"2\"/>\n",
                       cx - half, cx + half, py(s.median));
    out += "</g>\n";
    for (double v : series[i].values) {
      if (v < s.whisker_low || v > s.whisker_high) {
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"#d62728\"/>\n", cx, py(v));
      }
    }
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", cx,
                       kMargin + kHeight + 16, escape(series[i].label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace forte::svg
