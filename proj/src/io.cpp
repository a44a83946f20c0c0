#include "dlpp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dlpp/error.hpp"

namespace dlpp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.model << ',' << r.n << ',' << r.m << ',' << r.param << ',' << format_double(r.t) << ','
       << format_double(r.tau) << ',' << format_double(r.estimate) << ',' << format_double(r.sem) << ','
       << r.samples << ',' << r.seed << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::config_error, "cannot open " + path + " for writing");
  out << content;
  require(static_cast<bool>(out), ErrorCode::config_error, "failed writing " + path);
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;
  double map(double v) const { return log ? std::log10(v) : v; }
};

Axis fit_axis(const std::vector<PlotSeries>& series, bool use_x, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      lo = std::min(lo, a.map(v));
      hi = std::max(hi, a.map(v));
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  const double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 55;
  const double pw = width - left - right, ph = height - top - bottom;
  const Axis ax = fit_axis(series, true, spec.log_x);
  const Axis ay = fit_axis(series, false, spec.log_y);
  auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape_xml(spec.title) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"black\" points=\"" << num(left) << ',' << num(top) << ' ' << num(left)
     << ',' << num(top + ph) << ' ' << num(left + pw) << ',' << num(top + ph) << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double sx = left + pw * k / 4.0, sy = top + ph - ph * k / 4.0;
    os << "<text x=\"" << num(sx) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
       << tick_label(ax.log ? std::pow(10.0, fx) : fx) << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
       << tick_label(ay.log ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 12) << "\" text-anchor=\"middle\" font-size=\"12\">"
     << escape_xml(spec.x_label) << (spec.log_x ? " (log)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << num(top + ph / 2) << ")\">" << escape_xml(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % (sizeof colors / sizeof colors[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      const double x = series[s].x[i], y = series[s].y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (spec.log_x && x <= 0) || (spec.log_y && y <= 0)) continue;
      os << num(px(x)) << ',' << num(py(y)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(top + 14 + 14.0 * s) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << color << "\">" << escape_xml(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dlpp
