#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace bolasso::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label, bool log_x) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : series) {
    for (double x : s.x) {
      const double v = log_x ? std::log10(x) : x;
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double y : s.y) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) {
    const double v = log_x ? std::log10(x) : x;
    return kMarginLeft + (v - xmin) / (xmax - xmin) * plot_w;
  };
  auto py = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
         std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  out += "<rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" + std::to_string(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
  out += "<text x=\"18\" y=\"" + std::to_string(kHeight / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         std::to_string(kHeight / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
    out += "<text x=\"" + std::to_string(kWidth - kMarginRight - 150) + "\" y=\"" +
           std::to_string(kMarginTop + 16 + 16 * static_cast<int>(si)) + "\" font-size=\"12\" fill=\"" +
           color + "\">" + s.label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::vector<std::vector<double>>& values, const std::string& title,
                    const std::string& x_label, const std::string& y_label) {
  const std::size_t nrows = values.size();
  const std::size_t ncols = nrows == 0 ? 0 : values[0].size();
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
         std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  for (std::size_t i = 0; i < nrows; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      const double v = std::clamp(values[i][j], 0.0, 1.0);
      const int gray = static_cast<int>(std::lround(v * 255.0));
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", gray, gray, gray);
      const double x = kMarginLeft + plot_w * static_cast<double>(j) / static_cast<double>(ncols);
      const double y = kMarginTop + plot_h * static_cast<double>(i) / static_cast<double>(nrows);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
             num(plot_w / static_cast<double>(ncols) + 0.5) + "\" height=\"" +
             num(plot_h / static_cast<double>(nrows) + 0.5) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  out += "<rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" + std::to_string(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
  out += "<text x=\"18\" y=\"" + std::to_string(kHeight / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         std::to_string(kHeight / 2) + ")\">" + y_label + "</text>\n";
  out += "</svg>\n";
  return out;
}

void write_file(const std::string& content, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("svg: cannot open " + path + " for writing");
  f << content;
}

}  // namespace bolasso::svg
