#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/proxy.hpp"

using namespace dlpp;

namespace {

struct Pair {
  FieldSnapshot s0, st;
};

Pair snapshots(int n, int m, double t, std::uint64_t stream) {
  DynEnv env = make_env(FieldKind::brownian_mesh, n, m, std::nullopt, 31, stream);
  Pair p{env.snapshot(0.0), {}};
  p.st = env.snapshot(t);
  return p;
}

void check_invariants(const ProxyResult& r, const ProxyParams& params, int n, bool gap_bounds) {
  ASSERT_EQ(r.interpolation.front().level, 0);
  ASSERT_EQ(r.interpolation.back().level, n);
  ASSERT_EQ(r.interpolation.front().x, 0);
  validate_path(r.proxy);
  ASSERT_EQ(r.proxy.src, (GridPoint{0, 0}));
  ASSERT_EQ(r.proxy.dst.level, n);
  const double spacing = std::ldexp(1.0, -r.interpolation_exponent);
  if (gap_bounds) {
    for (std::size_t i = 1; i < r.interpolation.size(); ++i) {
      const double gap = static_cast<double>(r.interpolation[i].level - r.interpolation[i - 1].level) / n;
      ASSERT_GE(gap, spacing - 1.0 / n - 1e-12);
      ASSERT_LE(gap, 2 * spacing + 2.0 / n + 1e-12);
    }
  }
  for (const auto& e : r.retained) {
    const auto has = [&](GridPoint p) {
      return std::find(r.interpolation.begin(), r.interpolation.end(), p) != r.interpolation.end();
    };
    ASSERT_TRUE(has(e.start));
    ASSERT_TRUE(has(e.end));
    ASSERT_EQ(e.scale, params.ell);
    ASSERT_TRUE(e.flags.retained);
  }
  ASSERT_GE(static_cast<long>(r.retained.size()) * 2, r.candidate_count);
  double sum = 0;
  for (double w : r.segment_weights) sum += w;
  ASSERT_NEAR(sum, path_weight(r.proxy), 1e-9);
  ASSERT_NEAR(r.zigzag.weight, path_weight(r.proxy), 1e-12);
}

}  // namespace

TEST(Proxy, InterpolationExponent) {
  ProxyParams p;
  p.ell = 1;
  p.eta = 0.3;
  p.tau0 = 0.1;
  EXPECT_EQ(proxy_interpolation_exponent(p, 128), 2);
  p.eta = 3.0;
  EXPECT_EQ(proxy_interpolation_exponent(p, 4096), 11);
  EXPECT_THROW(proxy_interpolation_exponent(p, 1024), Error);
  p.xi = 0.5;
  EXPECT_THROW(proxy_interpolation_exponent(p, 4096), Error);
}

TEST(Proxy, ScanRetainsWellSeparatedExcursions) {
  const auto keep = retention_scan({{0.1, 0.2}, {0.5, 0.6}, {0.9, 0.95}}, 0.25);
  EXPECT_EQ(keep, (std::vector<bool>{true, true, true}));
}

TEST(Proxy, ScanAlternatesOnTightExcursions) {
  for (int k = 1; k <= 9; ++k) {
    std::vector<std::pair<double, double>> life;
    for (int i = 0; i < k; ++i) life.push_back({0.1 * i, 0.1 * i + 0.05});
    const auto keep = retention_scan(life, 0.25);
    EXPECT_EQ(std::count(keep.begin(), keep.end(), true), (k + 1) / 2);
  }
}

TEST(Proxy, InterpolationLevels) {
  EXPECT_EQ(interpolation_levels(16, 2, {}), (std::vector<int>{0, 4, 8, 12, 16}));
  // endpoint 6 lies in [4, 8]: both removed, 6 inserted
  EXPECT_EQ(interpolation_levels(16, 2, {6}), (std::vector<int>{0, 6, 12, 16}));
  // endpoint on a J level removes both neighbouring pairs
  EXPECT_EQ(interpolation_levels(16, 2, {8}), (std::vector<int>{0, 8, 16}));
  // 0 and n are never removed
  EXPECT_EQ(interpolation_levels(16, 2, {2, 14}), (std::vector<int>{0, 2, 8, 14, 16}));
}

TEST(Proxy, TimeZeroReproducesPolymer) {
  const auto p = snapshots(64, 4, 0.0, 0);
  const auto r = build_proxy(p.s0, p.st, ProxyParams{});
  EXPECT_EQ(r.candidate_count, 0);
  EXPECT_EQ(r.discarded_count, 0);
  EXPECT_EQ(r.proxy.dep, r.rho0.dep);
  const auto rep = proxy_report(r, p.s0, p.st);
  EXPECT_NEAR(rep.weight_gap, 0.0, 1e-9);
  EXPECT_EQ(rep.baseline_gap, 0.0);
  EXPECT_EQ(rep.retention_fraction, 1.0);
  EXPECT_EQ(rep.max_dist, 0.0);
}

TEST(Proxy, InvariantsOnRandomInstances) {
  ProxyParams a;  // ell = 1, m = 2
  ProxyParams b;
  b.ell = 2;
  b.xi = 0.125;  // m = 3
  for (const auto& params : {a, b}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const int n = 128;
      const double t = (0.5 + 0.05 * static_cast<double>(s)) / std::cbrt(128.0);
      const auto p = snapshots(n, 4, t, 1000 + s);
      const auto r = build_proxy(p.s0, p.st, params);
      ASSERT_EQ(r.interpolation_exponent, params.ell + 1);
      check_invariants(r, params, n, true);
      const auto rep = proxy_report(r, p.s0, p.st);
      ASSERT_GE(rep.retention_fraction, 0.5);
      ASSERT_EQ(r.discarded_count,
                static_cast<long>(excursion_decompose(r.rho0, r.rhot).size() - r.retained.size()));
    }
  }
}

TEST(Proxy, MismatchedInputs) {
  const auto p = snapshots(16, 2, 0.1, 0);
  const auto q = snapshots(16, 4, 0.1, 0);
  EXPECT_THROW(build_proxy(p.s0, q.st, ProxyParams{}), Error);
  const auto lat = make_env(FieldKind::gaussian, 16, std::nullopt, std::nullopt, 1, 0).snapshot(0.0);
  EXPECT_THROW(build_proxy(lat, lat, ProxyParams{}), Error);
}
