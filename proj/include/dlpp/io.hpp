#pragma once

#include <string>
#include <vector>

#include "dlpp/harness.hpp"

namespace dlpp {

/// Shortest round-trip-safe text: 17 significant digits.
std::string format_double(double v);

inline constexpr const char* kCsvHeader = "model,n,m,param,t,tau,estimate,sem,samples,seed";

std::string to_csv(const std::vector<ResultRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained SVG line plot; non-positive values are dropped on log axes.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace dlpp
