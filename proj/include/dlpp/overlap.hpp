#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlpp/lpp.hpp"
#include "dlpp/scaling.hpp"

namespace dlpp {

struct OverlapReport {
  PathKind kind = PathKind::upright;
  /// Shared vertex count (upright) or m^{-1} x shared horizontal edges (mesh).
  double raw = 0.0;
  /// Upright: raw / route vertex count. Mesh: 2n^{-1/3} x scaled Lebesgue measure = raw / n.
  double scaled = 0.0;
  std::vector<double> per_level;
  std::string convention;
};

OverlapReport overlap_measure(const LatticePath& a, const LatticePath& b);

/// Integer count of shared vertices (upright) or shared edges (mesh); no allocation.
long shared_count(const LatticePath& a, const LatticePath& b);

struct ExcursionFlags {
  bool is_excursion = true;
  bool normal = false;
  bool slender = false;
  bool weak = false;
  bool thin = false;
  bool wide = false;
  bool retained = false;
};

/// One maximal run of levels on which the two paths' departures differ.
struct ExcursionRecord {
  int n = 1;
  int m = 1;
  int level_b = 0;  ///< first level with differing departures
  int level_f = 0;  ///< first shared level after the run
  double b = 0.0;
  double f = 0.0;
  GridPoint start;  ///< shared point where the legs diverge
  GridPoint end;    ///< shared point where the legs rejoin
  /// Scaled leg departures on levels level_b..level_f; both legs end at `end`.
  std::vector<double> leg0;
  std::vector<double> leg1;
  int scale = 0;
  ExcursionFlags flags;

  double duration() const { return f - b; }
};

/// Dyadic scale l with d in (2^{-l-1}, 2^{-l}].
int dyadic_scale(double duration);

std::vector<ExcursionRecord> excursion_decompose(const LatticePath& a, const LatticePath& b);

/// Sub-path of `p` between the excursion's shared start and end points (energy left at 0).
LatticePath excursion_leg(const LatticePath& p, const ExcursionRecord& e);

struct ClassifyParams {
  double alpha = 1.0;
  double chi = 0.5;
  double tau0 = 0.5;
  std::optional<double> beta1;       ///< enables the thin flag
  std::optional<double> width_bound; ///< enables the wide flag (scaled units)
};

ExcursionFlags classify_excursion(const ExcursionRecord& e, const ClassifyParams& params);

/// Scaled horizontal extent of the union of both legs.
double excursion_width(const ExcursionRecord& e);

struct GeometryStats {
  std::vector<double> fluc;  ///< per level of the first path
  double max_fluc = 0.0;
  double max_dist = 0.0;
  double width = 0.0;
};

GeometryStats geometry_stats(const LatticePath& a, const LatticePath* b = nullptr);

bool regularity(const Zigzag& z, double kappa, double R);

/// Fraction of i in [0..n] with omega_i >= beta1 n^{-2/3}.
double steadiness(const Zigzag& z, double beta1);

/// Horizontal interval lengths omega_i along a (0,0) -> (0,1) zigzag.
std::vector<double> horizontal_intervals(const Zigzag& z);

struct DurationSummary {
  std::map<int, double> by_scale;
  double total = 0.0;
  double long_total = 0.0;   ///< durations >= n^{beta-1}
  double short_total = 0.0;
};

DurationSummary duration_by_scale(const std::vector<ExcursionRecord>& excursions,
                                  std::optional<double> beta = std::nullopt);

}  // namespace dlpp
