#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "forte/workspace.hpp"

// Minimal SVG writers. Output bytes depend only on the inputs.
namespace forte::svg {

struct ScatterPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

// Side-by-side square panels with equal axis scaling inside each panel.
std::string scatter(const std::vector<ScatterPanel>& panels, int panel_size = 360);

// XY (top) and XZ (side) projections in millimetres. Clouds larger than
// `max_points` are thinned by a fixed stride.
std::string workspace_projections(const WorkspaceCloud& cloud, std::size_t max_points = 20000);

struct BoxSeries {
  std::string label;
  std::vector<double> values;
};

// Five-number summary with linear-interpolated quartiles.
struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;  // furthest points within 1.5 IQR
};
BoxStats box_stats(std::vector<double> values);

std::string box_plot(const std::vector<BoxSeries>& series, const std::string& title, const std::string& y_label);

}  // namespace forte::svg
