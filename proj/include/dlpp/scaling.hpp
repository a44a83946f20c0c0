#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dlpp/lpp.hpp"

namespace dlpp {

struct ScaledPoint {
  double x = 0.0;
  double s = 0.0;
  int n = 1;
};

/// Scaled image of a path: departures phi(s) on each level of [s1, s2].
struct Zigzag {
  int n = 1;
  ScaledPoint start;
  ScaledPoint end;
  std::vector<double> phi;  ///< phi[i] at level s1 + i/n
  double weight = 0.0;
};

ScaledPoint scale_point(int n, double v1, double v2);
std::pair<double, double> unscale_point(int n, double x, double s);

/// Horizontal scale factor 2^{-1} n^{-2/3}.
double horizontal_unit(int n);
/// Weight scale factor 2^{-1/2} n^{-1/3}.
double weight_unit(int n);

struct Compatibility {
  bool ok = true;
  std::string reason;  ///< "grid", "order" or "horizontal" when not ok
};

Compatibility check_compatible_triple(int n, double s1, double s2, double x, double y);

/// 2^{-1/2} n^{-1/3} (E - 2n s_{1,2} - 2n^{2/3}(y - x)).
double weight_from_energy(int n, double energy, double s1, double s2, double x, double y);
double energy_from_weight(int n, double weight, double s1, double s2, double x, double y);

/// Scaled endpoints of a path.
ScaledPoint path_start(const LatticePath& path);
ScaledPoint path_end(const LatticePath& path);

/// Scaled departure of the path from the given level.
double scaled_departure(const LatticePath& path, int level);

/// Weight of the path's energy under the scaling.
double path_weight(const LatticePath& path);

Zigzag to_zigzag(const LatticePath& path);

}  // namespace dlpp
