#include "dlpp/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "dlpp/error.hpp"

namespace dlpp {

namespace {

void require_same_route(const LatticePath& a, const LatticePath& b) {
  require(a.kind == b.kind, ErrorCode::kind_mismatch, "paths of different kinds");
  require(a.same_route(b), ErrorCode::kind_mismatch, "paths on different routes or grids");
}

long level_shared(const LatticePath& a, const LatticePath& b, int level) {
  const int lo = std::max(a.arrival(level), b.arrival(level));
  const int hi = std::min(a.departure(level), b.departure(level));
  if (a.kind == PathKind::upright) return hi >= lo ? hi - lo + 1 : 0;
  return hi > lo ? hi - lo : 0;
}

double scaled_x(int n, int m, int grid_x, int level) {
  return horizontal_unit(n) * (static_cast<double>(grid_x) / m - level);
}

}  // namespace

long shared_count(const LatticePath& a, const LatticePath& b) {
  require_same_route(a, b);
  long total = 0;
  for (int level = a.src.level; level <= a.dst.level; ++level) total += level_shared(a, b, level);
  return total;
}

OverlapReport overlap_measure(const LatticePath& a, const LatticePath& b) {
  require_same_route(a, b);
  OverlapReport r;
  r.kind = a.kind;
  long total = 0;
  for (int level = a.src.level; level <= a.dst.level; ++level) {
    const long s = level_shared(a, b, level);
    total += s;
    r.per_level.push_back(a.kind == PathKind::upright ? static_cast<double>(s) : static_cast<double>(s) / a.m);
  }
  if (a.kind == PathKind::upright) {
    const int budget = (a.dst.x - a.src.x) + (a.dst.level - a.src.level) + 1;
    r.raw = static_cast<double>(total);
    r.scaled = r.raw / budget;
    r.convention = "shared vertices; scaled by route vertex count";
  } else {
    r.raw = static_cast<double>(total) / a.m;
    r.scaled = r.raw / a.n;
    r.convention = "m^-1 x shared edges; scaled 2n^-1/3 x scaled Lebesgue";
  }
  return r;
}

int dyadic_scale(double duration) {
  require(duration > 0.0 && duration <= 1.0 + 1e-12, ErrorCode::invalid_parameter,
          "duration must lie in (0,1]");
  int l = 0;
  while (duration <= std::ldexp(1.0, -l - 1)) ++l;
  return l;
}

std::vector<ExcursionRecord> excursion_decompose(const LatticePath& a, const LatticePath& b) {
  require_same_route(a, b);
  std::vector<ExcursionRecord> out;
  const int top = a.dst.level;
  int level = a.src.level;
  while (level <= top) {
    if (a.departure(level) == b.departure(level)) {
      ++level;
      continue;
    }
    const int i0 = level;
    while (level <= top && a.departure(level) != b.departure(level)) ++level;
    // Departures agree on the last level, so the run closes before it.
    const int f_level = level;
    ExcursionRecord e;
    e.n = a.n;
    e.m = a.m;
    e.level_b = i0;
    e.level_f = f_level;
    e.b = static_cast<double>(i0) / a.n;
    e.f = static_cast<double>(f_level) / a.n;
    e.start = GridPoint{std::min(a.departure(i0), b.departure(i0)), i0};
    e.end = GridPoint{std::max(a.departure(f_level - 1), b.departure(f_level - 1)), f_level};
    for (int h = i0; h < f_level; ++h) {
      e.leg0.push_back(scaled_x(a.n, a.m, a.departure(h), h));
      e.leg1.push_back(scaled_x(b.n, b.m, b.departure(h), h));
    }
    const double xe = scaled_x(a.n, a.m, e.end.x, f_level);
    e.leg0.push_back(xe);
    e.leg1.push_back(xe);
    e.scale = dyadic_scale(static_cast<double>(f_level - i0) / a.n);
    e.flags.is_excursion = true;
    out.push_back(std::move(e));
  }
  return out;
}

LatticePath excursion_leg(const LatticePath& p, const ExcursionRecord& e) {
  require(p.n == e.n && p.m == e.m && p.src.level <= e.level_b && p.dst.level >= e.level_f,
          ErrorCode::kind_mismatch, "excursion does not belong to this path");
  LatticePath leg;
  leg.kind = p.kind;
  leg.n = p.n;
  leg.m = p.m;
  leg.src = e.start;
  leg.dst = e.end;
  for (int h = e.level_b; h < e.level_f; ++h) leg.dep.push_back(p.departure(h));
  leg.dep.push_back(e.end.x);
  validate_path(leg);
  return leg;
}

double excursion_width(const ExcursionRecord& e) {
  double lo = horizontal_unit(e.n) * (static_cast<double>(e.start.x) / e.m - e.level_b);
  double hi = lo;
  for (std::size_t i = 0; i < e.leg0.size(); ++i) {
    hi = std::max({hi, e.leg0[i], e.leg1[i]});
    lo = std::min({lo, e.leg0[i], e.leg1[i]});
  }
  // Arrivals sit half a unit left of the previous departure after the level shift.
  const double shift = horizontal_unit(e.n);
  for (std::size_t i = 0; i + 1 < e.leg0.size(); ++i) {
    lo = std::min({lo, e.leg0[i] - shift, e.leg1[i] - shift});
  }
  return hi - lo;
}

ExcursionFlags classify_excursion(const ExcursionRecord& e, const ClassifyParams& p) {
  require(p.alpha > 0.0, ErrorCode::invalid_parameter, "alpha must be > 0");
  require(p.chi > 0.0 && p.chi < 1.0, ErrorCode::invalid_parameter, "chi must lie in (0,1)");
  require(p.tau0 > 0.0 && p.tau0 < 1.0, ErrorCode::invalid_parameter, "tau0 must lie in (0,1)");
  require(e.leg0.size() == e.leg1.size() && !e.leg0.empty(), ErrorCode::invalid_parameter,
          "legs must be non-empty and aligned");
  require(e.f > e.b, ErrorCode::invalid_parameter, "duration must be positive");
  ExcursionFlags fl = e.flags;
  const double thresh = std::pow(e.f - e.b, 2.0 / 3.0) * std::pow(p.tau0, p.alpha);
  const std::size_t count = e.leg0.size();
  std::size_t strong = 0, half = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double sep = std::abs(e.leg0[i] - e.leg1[i]);
    if (sep >= thresh) ++strong;
    if (sep >= 0.5 * thresh) ++half;
  }
  const double need = (1.0 - p.chi) * static_cast<double>(count);
  const bool prop2 = static_cast<double>(strong) >= need - 1e-12;
  fl.weak = static_cast<double>(half) >= need - 1e-12;
  fl.normal = fl.is_excursion && prop2;
  fl.slender = fl.is_excursion && !prop2;
  if (p.beta1) {
    require(*p.beta1 > 0.0, ErrorCode::invalid_parameter, "beta1 must be > 0");
    const double cut = 0.25 * *p.beta1 * std::pow(static_cast<double>(e.n), -2.0 / 3.0);
    fl.thin = true;
    // Levels in [b, f): every entry but the shared endpoint level.
    for (std::size_t i = 0; i + 1 < count; ++i) {
      if (std::abs(e.leg0[i] - e.leg1[i]) >= cut) fl.thin = false;
    }
  }
  if (p.width_bound) fl.wide = excursion_width(e) > *p.width_bound;
  return fl;
}

GeometryStats geometry_stats(const LatticePath& a, const LatticePath* b) {
  if (b) require(a.kind == b->kind && a.n == b->n && a.m == b->m, ErrorCode::kind_mismatch,
                 "paths on different grids");
  GeometryStats g;
  const ScaledPoint s = path_start(a);
  const ScaledPoint e = path_end(a);
  double lo = s.x, hi = s.x;
  for (int level = a.src.level; level <= a.dst.level; ++level) {
    const double h = static_cast<double>(level) / a.n;
    const double line = e.s > s.s ? s.x + (e.x - s.x) * (h - s.s) / (e.s - s.s) : s.x;
    const double phi = scaled_departure(a, level);
    const double fl = std::abs(phi - line);
    g.fluc.push_back(fl);
    g.max_fluc = std::max(g.max_fluc, fl);
    hi = std::max(hi, phi);
    lo = std::min(lo, scaled_x(a.n, a.m, a.arrival(level), level));
  }
  if (b) {
    const int from = std::max(a.src.level, b->src.level);
    const int to = std::min(a.dst.level, b->dst.level);
    for (int level = from; level <= to; ++level) {
      g.max_dist = std::max(g.max_dist, std::abs(scaled_departure(a, level) - scaled_departure(*b, level)));
    }
    for (int level = b->src.level; level <= b->dst.level; ++level) {
      hi = std::max(hi, scaled_departure(*b, level));
      lo = std::min(lo, scaled_x(b->n, b->m, b->arrival(level), level));
    }
  }
  g.width = hi - lo;
  return g;
}

bool regularity(const Zigzag& z, double kappa, double R) {
  require(kappa > 0.0 && kappa < std::exp(-1.0), ErrorCode::invalid_parameter, "kappa must lie in (0, 1/e)");
  require(R > 0.0, ErrorCode::invalid_parameter, "R must be > 0");
  const double bound = R * std::pow(kappa, 2.0 / 3.0) * std::cbrt(std::log(1.0 / kappa));
  const long window = static_cast<long>(std::floor(6.0 * kappa * z.n + 1e-9));
  const long count = static_cast<long>(z.phi.size());
  for (long i = 0; i < count; ++i) {
    double lo = z.phi[static_cast<std::size_t>(i)], hi = lo;
    for (long j = i + 1; j < count && j - i <= window; ++j) {
      lo = std::min(lo, z.phi[static_cast<std::size_t>(j)]);
      hi = std::max(hi, z.phi[static_cast<std::size_t>(j)]);
      if (hi - lo > bound) return false;
    }
  }
  return true;
}

std::vector<double> horizontal_intervals(const Zigzag& z) {
  require(std::abs(z.start.x) <= 1e-9 && std::abs(z.start.s) <= 1e-9 && std::abs(z.end.x) <= 1e-9 &&
              std::abs(z.end.s - 1.0) <= 1e-9 && z.phi.size() == static_cast<std::size_t>(z.n + 1),
          ErrorCode::invalid_parameter, "steadiness needs the (0,0) -> (0,1) route");
  const double unit = horizontal_unit(z.n);
  std::vector<double> w(z.phi.size());
  w[0] = z.phi[0] - z.start.x;
  for (std::size_t i = 1; i < z.phi.size(); ++i) w[i] = z.phi[i] - z.phi[i - 1] + unit;
  return w;
}

double steadiness(const Zigzag& z, double beta1) {
  require(beta1 > 0.0, ErrorCode::invalid_parameter, "beta1 must be > 0");
  const auto w = horizontal_intervals(z);
  const double cut = beta1 * std::pow(static_cast<double>(z.n), -2.0 / 3.0);
  long count = 0;
  for (double v : w) {
    if (v >= cut * (1.0 - 1e-12)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(w.size());
}

DurationSummary duration_by_scale(const std::vector<ExcursionRecord>& excursions, std::optional<double> beta) {
  DurationSummary d;
  for (const auto& e : excursions) {
    const double dur = e.duration();
    d.by_scale[dyadic_scale(dur)] += dur;
    d.total += dur;
    if (beta) {
      const double cut = std::pow(static_cast<double>(e.n), *beta - 1.0);
      (dur >= cut ? d.long_total : d.short_total) += dur;
    }
  }
  return d;
}

}  // namespace dlpp
