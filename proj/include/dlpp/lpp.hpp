#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dlpp/noise.hpp"

namespace dlpp {

enum class PathKind { upright, east_north };

/// A point on the path grid: x is a vertex column (upright) or an m-grid index (mesh).
struct GridPoint {
  int x = 0;
  int level = 0;
  bool operator==(const GridPoint&) const = default;
};

/// Canonical monotone path stored as per-level departures.
struct LatticePath {
  PathKind kind = PathKind::upright;
  int n = 1;  ///< lattice size used for scaling
  int m = 1;  ///< grid density (1 for upright)
  GridPoint src;
  GridPoint dst;
  std::vector<int> dep;  ///< dep[i - src.level] = rightmost grid index on level i
  double energy = 0.0;

  int levels() const { return static_cast<int>(dep.size()); }
  int departure(int level) const { return dep[static_cast<std::size_t>(level - src.level)]; }
  /// Grid index at which the path enters the given level.
  int arrival(int level) const { return level == src.level ? src.x : departure(level - 1); }
  bool same_route(const LatticePath& o) const {
    return kind == o.kind && n == o.n && m == o.m && src == o.src && dst == o.dst;
  }
};

/// Maximum energy upright path between lattice vertices, uppermost-leftmost on ties.
LatticePath max_energy_upright(const FieldSnapshot& snap, GridPoint src, GridPoint dst);

/// Maximum energy east-north path between m-grid points (grid indices).
LatticePath max_energy_mesh(const FieldSnapshot& snap, GridPoint src, GridPoint dst);

/// Same, with real unscaled horizontal coordinates snapped rightward to the m-grid.
LatticePath max_energy_mesh(const FieldSnapshot& snap, double x, int i, double y, int j);

/// Dispatch on snapshot kind.
LatticePath max_energy(const FieldSnapshot& snap, GridPoint src, GridPoint dst);

/// Route (0,0) -> (n,n) in grid units of the snapshot.
LatticePath full_route_geodesic(const FieldSnapshot& snap);

/// Rightward snap of an unscaled coordinate to an m-grid index.
int snap_to_grid(double x, int m);

/// Re-sums the field along the path with compensated summation.
double path_energy(const FieldSnapshot& snap, const LatticePath& path);

/// Throws unless the path is monotone with consistent endpoints.
void validate_path(const LatticePath& path);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Number of admissible paths between the endpoints (saturating).
std::uint64_t count_paths(const FieldSnapshot& snap, GridPoint src, GridPoint dst);

/// Visits every admissible path (departure sequence and energy).
void enumerate_paths(const FieldSnapshot& snap, GridPoint src, GridPoint dst,
                     const std::function<void(const std::vector<int>&, double)>& visit);

/// Exhaustive maximum; throws instance_too_large above kBruteForceLimit paths.
double brute_force_energy(const FieldSnapshot& snap, GridPoint src, GridPoint dst);

/// Forward table: best energy of a path (0,0) -> (k, level), i.e. departing that level at k.
/// Entry [level][k] for levels 0..last_level, k in 0..n*m.
std::vector<std::vector<double>> mesh_forward_table(const FieldSnapshot& snap, int last_level);

/// Backward table: best energy from (k, level) to (n*m, n), for levels first_level..n.
std::vector<std::vector<double>> mesh_backward_table(const FieldSnapshot& snap, int first_level);

/// Z_n(x,a) on every m-grid column at level L = n a (L in [0, n-1]).
std::vector<double> routed_profile_columns(const FieldSnapshot& snap, int level);

/// Z_n(x,a) at the requested scaled positions; a must be on the n^{-1} grid in (0,1).
std::vector<double> routed_profile(const FieldSnapshot& snap, double a, const std::vector<double>& x_grid);

/// Open/closed table for three-way-up LPP: rows 0..K, columns u in [-half_width, half_width].
struct ThreeWayTable {
  int K = 1;
  int half_width = 1;
  std::vector<std::uint8_t> open;  ///< row-major, [level * (2*half_width+1) + u + half_width]
  bool at(int u, int level) const {
    return open[static_cast<std::size_t>(level) * static_cast<std::size_t>(2 * half_width + 1) +
                static_cast<std::size_t>(u + half_width)] != 0;
  }
};

/// Maximum number of open vertices on a three-way-up path (0,0) -> (0,K).
int three_way_up_energy(const ThreeWayTable& table);

struct PointSet2D {
  std::vector<std::pair<double, double>> points;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};

PointSet2D make_point_set(std::vector<std::pair<double, double>> points);

/// Longest chain src -> p_1 -> ... -> p_k -> dst with |dx| <= dy between consecutive points.
int poisson_lpp_energy(const PointSet2D& points, std::pair<double, double> src,
                       std::pair<double, double> dst);

/// Coarse mesh whose increments are sums of `factor` consecutive fine increments.
FieldSnapshot coarsen_mesh(const FieldSnapshot& fine, int factor);

/// Largest range of partial sums (including the empty sum) of fine increments within one
/// coarse cell, over all coarse cells and levels.
double mesh_oscillation(const FieldSnapshot& fine, int factor);

/// Upper-tail rate 2x acosh(x/2) - 2 sqrt(x^2 - 4), x >= 2.
double seppalainen_rate(double x);

}  // namespace dlpp
