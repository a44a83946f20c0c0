#include "dlpp/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dlpp/error.hpp"

namespace dlpp {

int proxy_interpolation_exponent(const ProxyParams& p, int n) {
  require(p.ell >= 0, ErrorCode::invalid_parameter, "ell must be >= 0");
  require(p.eta > 0.0, ErrorCode::invalid_parameter, "eta must be > 0");
  require(p.tau0 > 0.0 && p.tau0 < 1.0, ErrorCode::invalid_parameter, "tau0 must lie in (0,1)");
  require(p.xi > 0.0 && p.xi < 0.5, ErrorCode::invalid_parameter, "xi must lie in (0,1/2)");
  const int m = static_cast<int>(std::lround(p.ell + p.eta * std::log2(1.0 / p.tau0)));
  require(m >= p.ell, ErrorCode::invalid_parameter, "interpolation exponent below ell");
  require(m < 31 && (1L << m) <= n, ErrorCode::invalid_parameter, "2^m exceeds n");
  return m;
}

std::vector<bool> retention_scan(const std::vector<std::pair<double, double>>& lifetimes, double gap) {
  std::vector<bool> keep(lifetimes.size(), false);
  for (std::size_t i = 0; i < lifetimes.size(); ++i) {
    keep[i] = i == 0 || !(keep[i - 1] && lifetimes[i].first - lifetimes[i - 1].second <= gap + 1e-12);
  }
  return keep;
}

std::vector<int> interpolation_levels(int n, int m_exp, const std::vector<int>& endpoint_levels) {
  const long parts = 1L << m_exp;
  std::vector<int> j_levels;
  for (long k = 0; k <= parts; ++k) j_levels.push_back(static_cast<int>((static_cast<long>(n) * k) / parts));
  std::vector<bool> removed(j_levels.size(), false);
  for (int e : endpoint_levels) {
    for (std::size_t k = 0; k + 1 < j_levels.size(); ++k) {
      if (j_levels[k] <= e && e <= j_levels[k + 1]) {
        removed[k] = true;
        removed[k + 1] = true;
      }
    }
  }
  std::set<int> out;
  for (std::size_t k = 0; k < j_levels.size(); ++k) {
    if (!removed[k] || j_levels[k] == 0 || j_levels[k] == n) out.insert(j_levels[k]);
  }
  out.insert(endpoint_levels.begin(), endpoint_levels.end());
  return {out.begin(), out.end()};
}

ProxyResult build_proxy(const FieldSnapshot& snap0, const FieldSnapshot& snapt, const ProxyParams& params) {
  require(snap0.kind == FieldKind::brownian_mesh && snapt.kind == FieldKind::brownian_mesh, ErrorCode::kind_mismatch,
          "proxy needs mesh snapshots");
  require(snap0.n == snapt.n && snap0.m == snapt.m, ErrorCode::kind_mismatch, "snapshots on different meshes");
  require(snapt.t >= snap0.t, ErrorCode::time_regression, "time-t snapshot precedes time zero");
  const int n = snap0.n;
  ProxyResult r;
  r.interpolation_exponent = proxy_interpolation_exponent(params, n);
  const double spacing = std::ldexp(1.0, -r.interpolation_exponent);

  r.rho0 = full_route_geodesic(snap0);
  r.rhot = full_route_geodesic(snapt);
  auto all = excursion_decompose(r.rho0, r.rhot);

  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& e = all[i];
    if (e.scale == params.ell && e.b >= params.xi - 1e-12 && e.f <= 1.0 - params.xi + 1e-12) cand.push_back(i);
  }
  r.candidate_count = static_cast<long>(cand.size());
  std::vector<std::pair<double, double>> lifetimes;
  for (std::size_t i : cand) lifetimes.emplace_back(all[i].b, all[i].f);
  const auto keep = retention_scan(lifetimes, spacing);

  ClassifyParams cp;
  cp.alpha = params.alpha;
  cp.chi = params.chi;
  cp.tau0 = params.tau0;
  std::vector<int> endpoints;
  std::map<int, int> endpoint_x;
  for (std::size_t c = 0; c < cand.size(); ++c) {
    if (!keep[c]) continue;
    ExcursionRecord e = all[cand[c]];
    e.flags = classify_excursion(e, cp);
    e.flags.retained = true;
    endpoints.push_back(e.level_b);
    endpoints.push_back(e.level_f);
    endpoint_x[e.level_b] = e.start.x;
    endpoint_x[e.level_f] = e.end.x;
    r.retained.push_back(std::move(e));
  }
  r.discarded_count = static_cast<long>(all.size() - r.retained.size());

  for (int level : interpolation_levels(n, r.interpolation_exponent, endpoints)) {
    int u = 0;
    if (level == 0) {
      u = r.rhot.src.x;
    } else if (level == n) {
      u = r.rhot.dst.x;
    } else if (auto it = endpoint_x.find(level); it != endpoint_x.end()) {
      u = it->second;
    } else {
      u = r.rhot.departure(level);
    }
    r.interpolation.push_back(GridPoint{u, level});
  }

  LatticePath& proxy = r.proxy;
  proxy.kind = PathKind::east_north;
  proxy.n = n;
  proxy.m = snap0.m;
  proxy.src = r.interpolation.front();
  proxy.dst = r.interpolation.back();
  for (std::size_t i = 0; i + 1 < r.interpolation.size(); ++i) {
    const LatticePath seg = max_energy_mesh(snap0, r.interpolation[i], r.interpolation[i + 1]);
    r.segment_weights.push_back(path_weight(seg));
    // The last level of a segment is superseded by the next segment's first level.
    const bool last = i + 2 == r.interpolation.size();
    for (int k = 0; k < seg.levels() - (last ? 0 : 1); ++k) proxy.dep.push_back(seg.dep[static_cast<std::size_t>(k)]);
  }
  validate_path(proxy);
  proxy.energy = path_energy(snap0, proxy);
  r.zigzag = to_zigzag(proxy);
  return r;
}

ProxyReport proxy_report(const ProxyResult& result, const FieldSnapshot& snap0, const FieldSnapshot& snapt) {
  require(result.proxy.n == snap0.n && result.proxy.m == snap0.m && snapt.n == snap0.n && snapt.m == snap0.m,
          ErrorCode::kind_mismatch, "result and snapshots do not match");
  ProxyReport rep;
  LatticePath rt0 = result.rhot;
  rt0.energy = path_energy(snap0, rt0);
  LatticePath rtt = result.rhot;
  rtt.energy = path_energy(snapt, rtt);
  const double wt = path_weight(rtt);
  rep.weight_gap = std::abs(path_weight(result.proxy) - wt);
  rep.baseline_gap = std::abs(path_weight(rt0) - wt);
  rep.retention_fraction =
      result.candidate_count == 0 ? 1.0 : static_cast<double>(result.retained.size()) / result.candidate_count;
  rep.max_dist = geometry_stats(result.proxy, &result.rhot).max_dist;
  return rep;
}

}  // namespace dlpp
