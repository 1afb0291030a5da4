#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sharpcs/experiments.hpp"

namespace sharpcs {

struct PlotSeries {
  std::string name;  // "mean", "p10", "p90"
  Vector y;          // NaN entries break the curve
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  Vector x;
  std::vector<PlotSeries> series;
};

/// Standalone SVG with axes, ticks, labels and one polyline per series. Each
/// polyline carries its values in data-x / data-y attributes (17 digits).
std::string render_svg(const LinePlot& plot);

struct ReportOptions {
  bool log_error = true;
  bool log_iterations = true;
  bool log_condition = true;
  bool log_probability = false;
};

/// The four condition-sweep plots built from summarize(records).
std::vector<LinePlot> sweep_plots(std::span<const TrialRecord> records, const ReportOptions& options);

/// Writes error.svg, probability.svg, iterations.svg and condition.svg into
/// out_dir and returns their paths.
std::vector<std::filesystem::path> render_report(std::span<const TrialRecord> records,
                                                 const std::filesystem::path& out_dir,
                                                 const ReportOptions& options = {});

}  // namespace sharpcs
