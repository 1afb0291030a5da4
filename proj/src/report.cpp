#include "sharpcs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sharpcs/error.hpp"
#include "sharpcs/textio.hpp"

namespace sharpcs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 60.0;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string value_list(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += std::isfinite(values[i]) ? format_double(values[i]) : std::string("nan");
  }
  return out;
}

// Roughly five round tick values covering [lo, hi].
Vector linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw) break;
  }
  Vector ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
  return ticks;
}

const char* series_color(std::string_view name) {
  if (name == "mean") return "#1f4e9c";
  return "#c0392b";
}

}  // namespace

std::string render_svg(const LinePlot& plot) {
  require(!plot.x.empty(), ErrorCode::kInvalidArgument, "render_svg: no x values");
  for (const auto& s : plot.series) {
    require(s.y.size() == plot.x.size(), ErrorCode::kInvalidArgument, "render_svg: series length mismatch");
  }
  auto transform_y = [&](double v) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    if (plot.log_y) return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
    return v;
  };

  double x_lo = *std::min_element(plot.x.begin(), plot.x.end());
  double x_hi = *std::max_element(plot.x.begin(), plot.x.end());
  if (x_hi == x_lo) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const auto& s : plot.series) {
    for (double v : s.y) {
      const double t = transform_y(v);
      if (std::isfinite(t)) {
        y_lo = std::min(y_lo, t);
        y_hi = std::max(y_hi, t);
      }
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (plot.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::max(std::ceil(y_hi), y_lo + 1.0);
  } else {
    if (y_hi == y_lo) {
      y_lo -= 0.5;
      y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" +
         fixed(kHeight) + "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) + "\">\n";
  svg += "<title>" + escape(plot.title) + "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) +
         "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + escape(plot.title) + "</text>\n";

  // Axes.
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(kTop + plot_h) + "\" x2=\"" + fixed(kLeft + plot_w) +
         "\" y2=\"" + fixed(kTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(kTop) + "\" x2=\"" + fixed(kLeft) + "\" y2=\"" +
         fixed(kTop + plot_h) + "\"/>\n";
  svg += "</g>\n";

  svg += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const std::size_t x_stride = std::max<std::size_t>(1, (plot.x.size() + 11) / 12);
  for (std::size_t i = 0; i < plot.x.size(); i += x_stride) {
    const double x = px(plot.x[i]);
    svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(kTop + plot_h) + "\" x2=\"" + fixed(x) + "\" y2=\"" +
           fixed(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(kTop + plot_h + 18) + "\" text-anchor=\"middle\">" +
           tick_label(plot.x[i]) + "</text>\n";
  }
  Vector y_ticks;
  if (plot.log_y) {
    const double step = std::max(1.0, std::ceil((y_hi - y_lo) / 8.0));
    for (double t = y_lo; t <= y_hi + 1e-9; t += step) y_ticks.push_back(t);
  } else {
    y_ticks = linear_ticks(y_lo, y_hi);
  }
  for (double t : y_ticks) {
    const double y = py(t);
    const std::string label = plot.log_y ? "1e" + tick_label(t) : tick_label(t);
    svg += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(kLeft) + "\" y2=\"" +
           fixed(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">" + label +
           "</text>\n";
  }
  svg += "</g>\n";

  svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(plot.x_label) +
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + fixed(kTop + plot_h / 2) + "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
         fixed(kTop + plot_h / 2) + ")\">" + escape(plot.y_label) + (plot.log_y ? " (log scale)" : "") +
         "</text>\n";

  for (const auto& s : plot.series) {
    std::string d;
    bool pen_down = false;
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      const double t = transform_y(s.y[i]);
      if (!std::isfinite(t)) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : (d.empty() ? "M" : " M")) + fixed(px(plot.x[i])) + " " + fixed(py(t));
      pen_down = true;
    }
    svg += "<path class=\"series\" data-series=\"" + escape(s.name) + "\" data-x=\"" + value_list(plot.x) +
           "\" data-y=\"" + value_list(s.y) + "\" d=\"" + (d.empty() ? "M0 0" : d) +
           "\" fill=\"none\" stroke=\"" + series_color(s.name) + "\" stroke-width=\"" +
           (s.name == "mean" ? "2" : "1.2") + "\"" + (s.name == "mean" ? "" : " stroke-dasharray=\"5 3\"") +
           "/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<LinePlot> sweep_plots(std::span<const TrialRecord> records, const ReportOptions& options) {
  require(!records.empty(), ErrorCode::kInvalidArgument, "report: no trial records");
  const auto rows = summarize(records);
  Vector x;
  PlotSeries err_mean{"mean", {}}, err_p10{"p10", {}}, err_p90{"p90", {}};
  PlotSeries prob{"mean", {}};
  PlotSeries it_mean{"mean", {}}, it_p10{"p10", {}}, it_p90{"p90", {}};
  PlotSeries c_mean{"mean", {}}, c_p10{"p10", {}}, c_p90{"p90", {}};
  for (const auto& r : rows) {
    x.push_back(static_cast<double>(r.n));
    err_mean.y.push_back(r.mean_err);
    err_p10.y.push_back(r.p10_err);
    err_p90.y.push_back(r.p90_err);
    prob.y.push_back(r.prob_exact);
    it_mean.y.push_back(r.gmean_iters);
    it_p10.y.push_back(r.p10_iters);
    it_p90.y.push_back(r.p90_iters);
    c_mean.y.push_back(r.gmean_clower);
    c_p10.y.push_back(r.p10_clower);
    c_p90.y.push_back(r.p90_clower);
  }
  const std::string n_label = "number of measurements n";
  return {
      LinePlot{"Recovery error", n_label, "||x - x0||_2", options.log_error, x, {err_mean, err_p10, err_p90}},
      LinePlot{"Exact recovery probability", n_label, "probability", options.log_probability, x, {prob}},
      LinePlot{"Iterations to tolerance", n_label, "inner iterations", options.log_iterations, x,
               {it_mean, it_p10, it_p90}},
      LinePlot{"Condition number lower bound", n_label, "C_lower", options.log_condition, x,
               {c_mean, c_p10, c_p90}},
  };
}

std::vector<std::filesystem::path> render_report(std::span<const TrialRecord> records,
                                                 const std::filesystem::path& out_dir,
                                                 const ReportOptions& options) {
  const auto plots = sweep_plots(records, options);
  const char* names[] = {"error.svg", "probability.svg", "iterations.svg", "condition.svg"};
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < plots.size(); ++i) {
    const auto path = out_dir / names[i];
    write_text_file(path, render_svg(plots[i]));
    written.push_back(path);
  }
  return written;
}

}  // namespace sharpcs
