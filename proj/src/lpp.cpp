#include "dlpp/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dlpp/error.hpp"
#include "dlpp/scaling.hpp"

namespace dlpp {

namespace {

void check_lattice_endpoints(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  require(is_lattice(snap.kind), ErrorCode::kind_mismatch, "upright LPP needs a lattice snapshot");
  const auto inside = [&](GridPoint p) {
    return p.x >= 0 && p.x <= snap.n && p.level >= 0 && p.level <= snap.n;
  };
  require(inside(src) && inside(dst), ErrorCode::out_of_range, "endpoint outside the lattice");
  require(src.x <= dst.x && src.level <= dst.level, ErrorCode::invalid_parameter,
          "dst must dominate src coordinatewise");
}

void check_mesh_endpoints(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch,
          "mesh LPP needs a mesh snapshot");
  const int w = snap.n * snap.m;
  const auto inside = [&](GridPoint p) {
    return p.x >= 0 && p.x <= w && p.level >= 0 && p.level <= snap.n;
  };
  require(inside(src) && inside(dst), ErrorCode::out_of_range, "endpoint outside the mesh");
  require(src.x <= dst.x && src.level <= dst.level, ErrorCode::invalid_parameter,
          "incompatible mesh endpoints");
}

double kahan_sum(const std::vector<double>& terms) {
  double sum = 0.0, comp = 0.0;
  for (double v : terms) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

int snap_to_grid(double x, int m) {
  return static_cast<int>(std::ceil(x * m - 1e-9));
}

LatticePath max_energy_upright(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  check_lattice_endpoints(snap, src, dst);
  const int w = dst.x - src.x + 1;
  const int h = dst.level - src.level + 1;
  thread_local std::vector<double> g;
  g.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  const auto G = [&](int x, int i) -> double& {
    return g[static_cast<std::size_t>(i) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
  };
  for (int i = 0; i < h; ++i) {
    const double* row = &snap.values[static_cast<std::size_t>(src.level + i) * static_cast<std::size_t>(snap.n + 1) +
                                     static_cast<std::size_t>(src.x)];
    double* cur = &G(0, i);
    if (i == 0) {
      cur[0] = row[0];
      for (int x = 1; x < w; ++x) cur[x] = cur[x - 1] + row[x];
    } else {
      const double* below = &G(0, i - 1);
      cur[0] = below[0] + row[0];
      for (int x = 1; x < w; ++x) cur[x] = std::max(cur[x - 1], below[x]) + row[x];
    }
  }
  LatticePath path;
  path.kind = PathKind::upright;
  path.n = snap.n;
  path.m = 1;
  path.src = src;
  path.dst = dst;
  path.energy = G(w - 1, h - 1);
  path.dep.assign(static_cast<std::size_t>(h), 0);
  int x = w - 1, i = h - 1;
  path.dep[static_cast<std::size_t>(i)] = x;
  while (x > 0 || i > 0) {
    // Horizontal predecessor wins ties: keeps the path uppermost.
    if (x > 0 && (i == 0 || G(x - 1, i) >= G(x, i - 1))) {
      --x;
    } else {
      --i;
      path.dep[static_cast<std::size_t>(i)] = x;
    }
  }
  for (auto& d : path.dep) d += src.x;
  return path;
}

LatticePath max_energy_mesh(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  check_mesh_endpoints(snap, src, dst);
  const int cols = dst.x - src.x + 1;
  const int h = dst.level - src.level + 1;
  const int width = snap.n * snap.m;
  thread_local std::vector<double> a;
  a.resize(static_cast<std::size_t>(cols) * static_cast<std::size_t>(h));
  const auto A = [&](int k, int i) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(k)];
  };
  for (int i = 0; i < h; ++i) {
    const double* row = &snap.values[static_cast<std::size_t>(src.level + i) * static_cast<std::size_t>(width) +
                                     static_cast<std::size_t>(src.x)];
    double* cur = &A(0, i);
    if (i == 0) {
      cur[0] = 0.0;
      for (int k = 1; k < cols; ++k) cur[k] = cur[k - 1] + row[k - 1];
    } else {
      const double* below = &A(0, i - 1);
      cur[0] = below[0];
      for (int k = 1; k < cols; ++k) cur[k] = std::max(cur[k - 1] + row[k - 1], below[k]);
    }
  }
  LatticePath path;
  path.kind = PathKind::east_north;
  path.n = snap.n;
  path.m = snap.m;
  path.src = src;
  path.dst = dst;
  path.energy = A(cols - 1, h - 1);
  path.dep.assign(static_cast<std::size_t>(h), 0);
  int k = cols - 1, i = h - 1;
  path.dep[static_cast<std::size_t>(i)] = k;
  while (k > 0 || i > 0) {
    if (k > 0 && (i == 0 || A(k - 1, i) + snap.at(src.x + k - 1, src.level + i) >= A(k, i - 1))) {
      --k;
    } else {
      --i;
      path.dep[static_cast<std::size_t>(i)] = k;
    }
  }
  for (auto& d : path.dep) d += src.x;
  return path;
}

LatticePath max_energy_mesh(const FieldSnapshot& snap, double x, int i, double y, int j) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch,
          "mesh LPP needs a mesh snapshot");
  require(std::isfinite(x) && std::isfinite(y), ErrorCode::invalid_parameter, "non-finite endpoint");
  return max_energy_mesh(snap, GridPoint{snap_to_grid(x, snap.m), i}, GridPoint{snap_to_grid(y, snap.m), j});
}

LatticePath max_energy(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  return is_lattice(snap.kind) ? max_energy_upright(snap, src, dst) : max_energy_mesh(snap, src, dst);
}

LatticePath full_route_geodesic(const FieldSnapshot& snap) {
  const int right = is_lattice(snap.kind) ? snap.n : snap.n * snap.m;
  return max_energy(snap, GridPoint{0, 0}, GridPoint{right, snap.n});
}

double path_energy(const FieldSnapshot& snap, const LatticePath& path) {
  std::vector<double> terms;
  for (int level = path.src.level; level <= path.dst.level; ++level) {
    const int from = path.arrival(level);
    const int to = path.departure(level);
    if (path.kind == PathKind::upright) {
      for (int x = from; x <= to; ++x) terms.push_back(snap.at(x, level));
    } else {
      for (int k = from; k < to; ++k) terms.push_back(snap.at(k, level));
    }
  }
  return kahan_sum(terms);
}

void validate_path(const LatticePath& path) {
  require(path.levels() == path.dst.level - path.src.level + 1, ErrorCode::invalid_parameter,
          "departure count does not match the level span");
  int prev = path.src.x;
  for (int d : path.dep) {
    require(d >= prev, ErrorCode::invalid_parameter, "departures must be non-decreasing");
    prev = d;
  }
  require(path.dep.back() == path.dst.x, ErrorCode::invalid_parameter,
          "last departure must equal dst.x");
}

// ---------------------------------------------------------------------------
// Brute force

std::uint64_t count_paths(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  (void)snap;
  // C(dx + dl, dl) with saturation.
  const std::uint64_t dx = static_cast<std::uint64_t>(dst.x - src.x);
  const std::uint64_t dl = static_cast<std::uint64_t>(dst.level - src.level);
  long double c = 1.0L;
  for (std::uint64_t r = 1; r <= dl; ++r) {
    c = c * static_cast<long double>(dx + r) / static_cast<long double>(r);
    if (c > 1e18L) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(std::llround(c));
}

void enumerate_paths(const FieldSnapshot& snap, GridPoint src, GridPoint dst,
                     const std::function<void(const std::vector<int>&, double)>& visit) {
  if (is_lattice(snap.kind)) {
    check_lattice_endpoints(snap, src, dst);
  } else {
    check_mesh_endpoints(snap, src, dst);
  }
  const bool upright = is_lattice(snap.kind);
  const int h = dst.level - src.level + 1;
  std::vector<int> dep(static_cast<std::size_t>(h), dst.x);
  const auto segment = [&](int level, int from, int to) {
    double s = 0.0;
    if (upright) {
      for (int x = from; x <= to; ++x) s += snap.at(x, level);
    } else {
      for (int k = from; k < to; ++k) s += snap.at(k, level);
    }
    return s;
  };
  std::function<void(int, int, double)> rec = [&](int idx, int from, double acc) {
    const int level = src.level + idx;
    if (idx == h - 1) {
      visit(dep, acc + segment(level, from, dst.x));
      return;
    }
    for (int d = from; d <= dst.x; ++d) {
      dep[static_cast<std::size_t>(idx)] = d;
      rec(idx + 1, d, acc + segment(level, from, d));
    }
  };
  rec(0, src.x, 0.0);
}

double brute_force_energy(const FieldSnapshot& snap, GridPoint src, GridPoint dst) {
  require(count_paths(snap, src, dst) <= kBruteForceLimit, ErrorCode::instance_too_large,
          "brute force limited to 1e7 paths");
  double best = -std::numeric_limits<double>::infinity();
  enumerate_paths(snap, src, dst, [&](const std::vector<int>&, double e) { best = std::max(best, e); });
  return best;
}

// ---------------------------------------------------------------------------
// Routed profile

std::vector<std::vector<double>> mesh_forward_table(const FieldSnapshot& snap, int last_level) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  require(last_level >= 0 && last_level <= snap.n, ErrorCode::out_of_range, "level out of range");
  const int w = snap.n * snap.m;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(last_level + 1),
                                     std::vector<double>(static_cast<std::size_t>(w + 1)));
  for (int i = 0; i <= last_level; ++i) {
    auto& cur = a[static_cast<std::size_t>(i)];
    cur[0] = i == 0 ? 0.0 : a[static_cast<std::size_t>(i - 1)][0];
    for (int k = 1; k <= w; ++k) {
      const double right = cur[static_cast<std::size_t>(k - 1)] + snap.at(k - 1, i);
      cur[static_cast<std::size_t>(k)] =
          i == 0 ? right : std::max(right, a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]);
    }
  }
  return a;
}

std::vector<std::vector<double>> mesh_backward_table(const FieldSnapshot& snap, int first_level) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  require(first_level >= 0 && first_level <= snap.n, ErrorCode::out_of_range, "level out of range");
  const int w = snap.n * snap.m;
  const int h = snap.n - first_level + 1;
  std::vector<std::vector<double>> b(static_cast<std::size_t>(h), std::vector<double>(static_cast<std::size_t>(w + 1)));
  for (int r = h - 1; r >= 0; --r) {
    const int i = first_level + r;
    auto& cur = b[static_cast<std::size_t>(r)];
    cur[static_cast<std::size_t>(w)] = r == h - 1 ? 0.0 : b[static_cast<std::size_t>(r + 1)][static_cast<std::size_t>(w)];
    for (int k = w - 1; k >= 0; --k) {
      const double right = cur[static_cast<std::size_t>(k + 1)] + snap.at(k, i);
      cur[static_cast<std::size_t>(k)] =
          r == h - 1 ? right : std::max(right, b[static_cast<std::size_t>(r + 1)][static_cast<std::size_t>(k)]);
    }
  }
  return b;
}

std::vector<double> routed_profile_columns(const FieldSnapshot& snap, int level) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  require(level >= 0 && level <= snap.n - 1, ErrorCode::out_of_range, "level must lie in [0, n-1]");
  const auto fwd = mesh_forward_table(snap, level);
  const auto bwd = mesh_backward_table(snap, level + 1);
  const auto& f = fwd.back();
  const auto& g = bwd.front();
  const double c = weight_unit(snap.n);
  std::vector<double> z(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) z[k] = c * (f[k] + g[k] - 2.0 * snap.n);
  return z;
}

std::vector<double> routed_profile(const FieldSnapshot& snap, double a, const std::vector<double>& x_grid) {
  require(snap.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  const double na = a * snap.n;
  const int level = static_cast<int>(std::llround(na));
  require(std::abs(na - level) <= 1e-9, ErrorCode::invalid_parameter, "level not on the n^{-1} grid");
  require(level >= 1 && level <= snap.n - 1, ErrorCode::out_of_range, "level must lie in (0,1) with a + 1/n <= 1");
  const auto cols = routed_profile_columns(snap, level);
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    const double v1 = unscale_point(snap.n, x, a).first;
    require(std::isfinite(v1) && v1 >= -1e-9 && v1 <= snap.n + 1e-9, ErrorCode::out_of_range,
            "x outside the representable range");
    const int k = std::clamp(snap_to_grid(v1, snap.m), 0, snap.n * snap.m);
    out.push_back(cols[static_cast<std::size_t>(k)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Auxiliary models

int three_way_up_energy(const ThreeWayTable& t) {
  require(t.K >= 1, ErrorCode::invalid_parameter, "K must be >= 1");
  require(2 * t.half_width >= t.K, ErrorCode::invalid_parameter, "table narrower than the reachable cone");
  const int cols = 2 * t.half_width + 1;
  require(t.open.size() == static_cast<std::size_t>(cols) * static_cast<std::size_t>(t.K + 1),
          ErrorCode::invalid_parameter, "table shape mismatch");
  constexpr int kNone = std::numeric_limits<int>::min() / 2;
  std::vector<int> prev(static_cast<std::size_t>(cols), kNone), cur(static_cast<std::size_t>(cols), kNone);
  const auto idx = [&](int u) { return static_cast<std::size_t>(u + t.half_width); };
  prev[idx(0)] = t.at(0, 0) ? 1 : 0;
  for (int level = 1; level <= t.K; ++level) {
    std::fill(cur.begin(), cur.end(), kNone);
    const int reach = std::min(level, t.K - level);
    for (int u = -reach; u <= reach; ++u) {
      int best = kNone;
      for (int du = -1; du <= 1; ++du) {
        const int v = u + du;
        if (v < -t.half_width || v > t.half_width) continue;
        best = std::max(best, prev[idx(v)]);
      }
      if (best != kNone) cur[idx(u)] = best + (t.at(u, level) ? 1 : 0);
    }
    std::swap(prev, cur);
  }
  return prev[idx(0)];
}

PointSet2D make_point_set(std::vector<std::pair<double, double>> points) {
  PointSet2D s;
  for (const auto& [x, y] : points) {
    require(std::isfinite(x) && std::isfinite(y), ErrorCode::invalid_parameter, "non-finite point");
  }
  if (!points.empty()) {
    s.x_lo = s.x_hi = points.front().first;
    s.y_lo = s.y_hi = points.front().second;
    for (const auto& [x, y] : points) {
      s.x_lo = std::min(s.x_lo, x);
      s.x_hi = std::max(s.x_hi, x);
      s.y_lo = std::min(s.y_lo, y);
      s.y_hi = std::max(s.y_hi, y);
    }
  }
  s.points = std::move(points);
  return s;
}

int poisson_lpp_energy(const PointSet2D& cloud, std::pair<double, double> src, std::pair<double, double> dst) {
  require(dst.second > src.second, ErrorCode::invalid_parameter, "degenerate vertical span");
  require(std::abs(dst.first - src.first) <= dst.second - src.second, ErrorCode::invalid_parameter,
          "dst is not reachable by a directed path from src");
  // Rotate by 45 degrees: |dx| <= dy  <=>  du >= 0 and dv >= 0 with u = y + x, v = y - x.
  const double u0 = src.second + src.first, v0 = src.second - src.first;
  const double u1 = dst.second + dst.first, v1 = dst.second - dst.first;
  std::vector<std::pair<double, double>> uv;
  for (const auto& [x, y] : cloud.points) {
    const double u = y + x, v = y - x;
    if (u >= u0 && v >= v0 && u <= u1 && v <= v1) uv.emplace_back(u, v);
  }
  std::sort(uv.begin(), uv.end());
  // Longest non-decreasing subsequence in v.
  std::vector<double> tails;
  for (const auto& p : uv) {
    auto it = std::upper_bound(tails.begin(), tails.end(), p.second);
    if (it == tails.end()) {
      tails.push_back(p.second);
    } else {
      *it = p.second;
    }
  }
  return static_cast<int>(tails.size());
}

FieldSnapshot coarsen_mesh(const FieldSnapshot& fine, int factor) {
  require(fine.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  require(factor >= 1 && fine.m % factor == 0, ErrorCode::invalid_parameter,
          "mesh density not divisible by the factor");
  const int cm = fine.m / factor;
  const int cw = fine.n * cm;
  std::vector<double> values(static_cast<std::size_t>(cw) * static_cast<std::size_t>(fine.n + 1), 0.0);
  for (int i = 0; i <= fine.n; ++i) {
    for (int k = 0; k < cw; ++k) {
      double s = 0.0;
      for (int r = 0; r < factor; ++r) s += fine.at(k * factor + r, i);
      values[static_cast<std::size_t>(i) * static_cast<std::size_t>(cw) + static_cast<std::size_t>(k)] = s;
    }
  }
  return make_snapshot(FieldKind::brownian_mesh, fine.n, cm, std::move(values), fine.t);
}

double mesh_oscillation(const FieldSnapshot& fine, int factor) {
  require(fine.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch, "mesh snapshot required");
  require(factor >= 1 && fine.m % factor == 0, ErrorCode::invalid_parameter,
          "mesh density not divisible by the factor");
  const int cw = fine.n * (fine.m / factor);
  double osc = 0.0;
  for (int i = 0; i <= fine.n; ++i) {
    for (int k = 0; k < cw; ++k) {
      double s = 0.0, lo = 0.0, hi = 0.0;
      for (int r = 0; r < factor; ++r) {
        s += fine.at(k * factor + r, i);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      osc = std::max(osc, hi - lo);
    }
  }
  return osc;
}

double seppalainen_rate(double x) {
  require(std::isfinite(x) && x >= 2.0, ErrorCode::domain_error, "rate defined for x >= 2");
  return 2.0 * x * std::acosh(x / 2.0) - 2.0 * std::sqrt(x * x - 4.0);
}

}  // namespace dlpp
