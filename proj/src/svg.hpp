#pragma once

#include <string>
#include <vector>

namespace bolasso::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Simple line chart; x is plotted on a log10 axis when log_x is set.
std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label, bool log_x);

/// Grayscale heatmap of values in [0, 1]; row 0 is drawn at the top.
std::string heatmap(const std::vector<std::vector<double>>& values, const std::string& title,
                    const std::string& x_label, const std::string& y_label);

void write_file(const std::string& content, const std::string& path);

}  // namespace bolasso::svg
