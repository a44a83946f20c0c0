#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "dlpp/io.hpp"

using namespace dlpp;

TEST(Io, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, CsvSchema) {
  ResultRow r{"bernoulli", 200, 1, "scaled_overlap", 0.1, 0.5, 0.25, 0.01, 3000, 1};
  const std::string csv = to_csv({r});
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "model,n,m,param,t,tau,estimate,sem,samples,seed");
  EXPECT_EQ(line, "bernoulli,200,1,scaled_overlap,0.10000000000000001,0.5,0.25,0.01,3000,1");
}

TEST(Io, SvgHasOnePolylinePerSeries) {
  const std::string svg = render_svg({{"a", {0.1, 1, 10}, {1, 0.5, 0.2}}, {"b<c", {0.1, 1, 10}, {0.9, 0.4, 0.1}}},
                                     PlotSpec{"overlap", "tau", "O", true, false});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) ++count, ++pos;
  EXPECT_EQ(count, 3u);  // axes + two series
  EXPECT_NE(svg.find("b&lt;c"), std::string::npos);
}
