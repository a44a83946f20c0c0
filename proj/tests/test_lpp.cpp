#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/lpp.hpp"
#include "dlpp/scaling.hpp"

using namespace dlpp;

namespace {

FieldSnapshot lattice(int n, std::vector<double> v) { return make_snapshot(FieldKind::gaussian, n, 1, std::move(v)); }

FieldSnapshot random_mesh(int n, int m, std::uint64_t stream) {
  return make_env(FieldKind::brownian_mesh, n, m, std::nullopt, 77, stream).snapshot(0.0);
}

}  // namespace

TEST(Upright, LambdaOneExample) {
  // values indexed [level * (n+1) + x]
  const auto snap = make_snapshot(FieldKind::bernoulli, 1, 1, {1, 0, 1, 1});
  const LatticePath g = max_energy_upright(snap, {0, 0}, {1, 1});
  EXPECT_EQ(g.energy, 3.0);
  EXPECT_EQ(g.dep, (std::vector<int>{0, 1}));
  EXPECT_EQ(brute_force_energy(snap, {0, 0}, {1, 1}), 3.0);
}

TEST(Upright, AllZeroGivesLeftColumnThenTopRow) {
  const int n = 5;
  const auto snap = lattice(n, std::vector<double>((n + 1) * (n + 1), 0.0));
  const LatticePath g = full_route_geodesic(snap);
  EXPECT_EQ(g.energy, 0.0);
  for (int i = 0; i < n; ++i) EXPECT_EQ(g.departure(i), 0);
  EXPECT_EQ(g.departure(n), n);
}

TEST(Upright, MatchesBruteForceOnBernoulliLambdaFour) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto snap = make_env(FieldKind::bernoulli, 4, std::nullopt, 0.5, 1, s).snapshot(0.0);
    const LatticePath g = full_route_geodesic(snap);
    ASSERT_EQ(g.energy, brute_force_energy(snap, {0, 0}, {4, 4}));
    ASSERT_EQ(path_energy(snap, g), g.energy);
    // canonical geodesic is the component-wise minimum over all maximizers
    std::vector<int> lo(5, 4);
    enumerate_paths(snap, {0, 0}, {4, 4}, [&](const std::vector<int>& dep, double e) {
      if (e == g.energy) {
        for (std::size_t i = 0; i < dep.size(); ++i) lo[i] = std::min(lo[i], dep[i]);
      }
    });
    ASSERT_EQ(g.dep, lo);
  }
}

TEST(Upright, MatchesBruteForceOnGaussianLambdaThree) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto snap = make_env(FieldKind::gaussian, 3, std::nullopt, std::nullopt, 2, s).snapshot(0.0);
    const LatticePath g = full_route_geodesic(snap);
    ASSERT_NEAR(g.energy, brute_force_energy(snap, {0, 0}, {3, 3}), 1e-12);
    ASSERT_NEAR(path_energy(snap, g), g.energy, 1e-12);
  }
}

TEST(Upright, InteriorEndpoints) {
  const auto snap = make_env(FieldKind::uniform, 4, std::nullopt, std::nullopt, 3, 0).snapshot(0.0);
  const LatticePath g = max_energy_upright(snap, {1, 2}, {3, 4});
  EXPECT_NEAR(g.energy, brute_force_energy(snap, {1, 2}, {3, 4}), 1e-12);
  EXPECT_EQ(g.levels(), 3);
  validate_path(g);
}

TEST(Upright, EndpointErrors) {
  const auto snap = lattice(2, std::vector<double>(9, 0.0));
  EXPECT_THROW(max_energy_upright(snap, {0, 0}, {3, 2}), Error);
  EXPECT_THROW(max_energy_upright(snap, {2, 0}, {1, 2}), Error);
  EXPECT_THROW(max_energy_mesh(snap, {0, 0}, {1, 1}), Error);
}

TEST(Mesh, AllZeroIncrements) {
  const auto snap = make_snapshot(FieldKind::brownian_mesh, 3, 2, std::vector<double>(6 * 4, 0.0));
  EXPECT_EQ(full_route_geodesic(snap).energy, 0.0);
}

TEST(Mesh, SingleLevelIsIncrementSum) {
  const auto snap = random_mesh(3, 4, 0);
  const LatticePath g = max_energy_mesh(snap, {2, 1}, {9, 1});
  double s = 0.0;
  for (int k = 2; k < 9; ++k) s += snap.at(k, 1);
  EXPECT_NEAR(g.energy, s, 1e-12);
}

TEST(Mesh, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto snap = random_mesh(3, 3, s);
    const LatticePath g = full_route_geodesic(snap);
    ASSERT_NEAR(g.energy, brute_force_energy(snap, {0, 0}, {9, 3}), 1e-12);
    ASSERT_NEAR(path_energy(snap, g), g.energy, 1e-12);
    validate_path(g);
  }
}

TEST(Mesh, RealEndpointsSnapRightward) {
  const auto snap = random_mesh(4, 4, 3);
  const LatticePath a = max_energy_mesh(snap, 0.6, 0, 3.01, 4);
  EXPECT_EQ(a.src.x, 3);
  EXPECT_EQ(a.dst.x, 13);
  const LatticePath b = max_energy_mesh(snap, 0.75, 0, 3.0, 4);
  EXPECT_EQ(b.src.x, 3);
  EXPECT_EQ(b.dst.x, 12);
}

TEST(Mesh, AdditiveAcrossGeodesicSplitPoints) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto snap = random_mesh(8, 4, s);
    const LatticePath g = full_route_geodesic(snap);
    for (int level = 1; level < 8; ++level) {
      const GridPoint w{g.departure(level), level};
      const double sum = max_energy_mesh(snap, g.src, w).energy + max_energy_mesh(snap, w, g.dst).energy;
      ASSERT_NEAR(sum, g.energy, 1e-9);
    }
  }
}

TEST(Mesh, BruteForceGuard) {
  const auto snap = make_snapshot(FieldKind::brownian_mesh, 12, 4, std::vector<double>(48 * 13, 0.0));
  EXPECT_THROW(brute_force_energy(snap, {0, 0}, {48, 12}), Error);
}

TEST(RoutedProfile, ArgmaxIsPolymerDepartureAndValueIsWeight) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int n = 16, m = 4;
    const auto snap = random_mesh(n, m, 100 + s);
    const LatticePath g = full_route_geodesic(snap);
    const double w = path_weight(g);
    for (int level = 1; level < n; ++level) {
      const auto z = routed_profile_columns(snap, level);
      const auto top = std::max_element(z.begin(), z.end());
      EXPECT_EQ(top - z.begin(), g.departure(level));
      EXPECT_NEAR(z[static_cast<std::size_t>(g.departure(level))], w, 1e-9);
    }
  }
}

TEST(RoutedProfile, ScaledQueriesMatchColumns) {
  const int n = 8, m = 4;
  const auto snap = random_mesh(n, m, 5);
  const LatticePath g = full_route_geodesic(snap);
  const double a = 0.5;
  const double x = scaled_departure(g, 4);
  const auto z = routed_profile(snap, a, {x});
  EXPECT_NEAR(z[0], path_weight(g), 1e-9);
  EXPECT_THROW(routed_profile(snap, 0.3, {0.0}), Error);
  EXPECT_THROW(routed_profile(snap, 0.5, {100.0}), Error);
}

TEST(RoutedProfile, LargeInstanceBoundedByPolymerWeight) {
  const auto snap = random_mesh(64, 8, 9);
  const double w = path_weight(full_route_geodesic(snap));
  for (double v : routed_profile_columns(snap, 32)) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(v, w + 1e-9);
  }
}

TEST(ThreeWay, AllOpenAndAllClosed) {
  ThreeWayTable t{6, 6, std::vector<std::uint8_t>(13 * 7, 1)};
  EXPECT_EQ(three_way_up_energy(t), 7);
  std::fill(t.open.begin(), t.open.end(), 0);
  EXPECT_EQ(three_way_up_energy(t), 0);
}

TEST(ThreeWay, MatchesEnumeration) {
  const CounterRng rng(4, 0, Tag::test);
  for (std::uint64_t r = 0; r < 200; ++r) {
    ThreeWayTable t{6, 3, std::vector<std::uint8_t>(7 * 7)};
    for (std::size_t c = 0; c < t.open.size(); ++c) t.open[c] = rng.uniform(r, c) < 0.3 ? 1 : 0;
    int best = -1;
    // 3^6 step sequences, kept if they return to column 0
    for (int code = 0; code < 729; ++code) {
      int u = 0, c = code, score = t.at(0, 0);
      for (int level = 1; level <= 6; ++level) {
        u += c % 3 - 1;
        c /= 3;
        score += t.at(u, level);
      }
      if (u == 0) best = std::max(best, score);
    }
    ASSERT_EQ(three_way_up_energy(t), best);
  }
}

TEST(PoissonLpp, SimpleClouds) {
  EXPECT_EQ(poisson_lpp_energy(make_point_set({}), {0, 0}, {0, 1}), 0);
  EXPECT_EQ(poisson_lpp_energy(make_point_set({{0, 0.1}, {0, 0.3}, {0, 0.5}, {0, 0.7}, {0, 0.9}}), {0, 0}, {0, 1}), 5);
  EXPECT_THROW(poisson_lpp_energy(make_point_set({}), {0, 1}, {0, 1}), Error);
}

TEST(PoissonLpp, MatchesSubsetSearch) {
  const CounterRng rng(8, 0, Tag::test);
  for (std::uint64_t r = 0; r < 200; ++r) {
    const int k = static_cast<int>(rng.uniform(r, 999) * 16);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < k; ++i) pts.emplace_back(rng.uniform(r, 2 * i) * 2 - 1, rng.uniform(r, 2 * i + 1) * 2);
    const std::pair<double, double> src{0, 0}, dst{0, 2};
    int best = 0;
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<std::pair<double, double>> chain{src};
      for (int i = 0; i < k; ++i) {
        if (mask >> i & 1) chain.push_back(pts[static_cast<std::size_t>(i)]);
      }
      chain.push_back(dst);
      std::sort(chain.begin() + 1, chain.end() - 1, [](auto a, auto b) { return a.second < b.second; });
      bool ok = true;
      for (std::size_t i = 0; i + 1 < chain.size() && ok; ++i) {
        ok = std::abs(chain[i + 1].first - chain[i].first) <= chain[i + 1].second - chain[i].second;
      }
      if (ok) best = std::max(best, __builtin_popcount(static_cast<unsigned>(mask)));
    }
    ASSERT_EQ(poisson_lpp_energy(make_point_set(pts), src, dst), best);
  }
}

TEST(Coarsen, SumsAndZeroField) {
  const auto fine = random_mesh(3, 8, 1);
  const auto coarse = coarsen_mesh(fine, 2);
  EXPECT_EQ(coarse.m, 4);
  for (int i = 0; i <= 3; ++i) {
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(coarse.at(k, i), fine.at(2 * k, i) + fine.at(2 * k + 1, i), 1e-15);
  }
  const auto zero = make_snapshot(FieldKind::brownian_mesh, 2, 4, std::vector<double>(8 * 3, 0.0));
  for (double v : coarsen_mesh(zero, 2).values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(mesh_oscillation(zero, 2), 0.0);
  EXPECT_THROW(coarsen_mesh(fine, 3), Error);
}

TEST(Coarsen, RefinementMonotoneAndOscillationGap) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto fine = random_mesh(4, 8, 500 + s);
    const auto coarse = coarsen_mesh(fine, 2);
    const double mf = full_route_geodesic(fine).energy, mc = full_route_geodesic(coarse).energy;
    ASSERT_LE(mc, mf + 1e-12);
    ASSERT_LE(mf - mc, 2 * 4 * mesh_oscillation(fine, 2) + 1e-12);
  }
}

TEST(Seppalainen, RateValues) {
  EXPECT_EQ(seppalainen_rate(2.0), 0.0);
  EXPECT_NEAR(seppalainen_rate(3.0), 6 * std::acosh(1.5) - 2 * std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(seppalainen_rate(3.0), 1.3024059, 1e-6);
  for (double x = 2.0; x < 10.0; x += 0.1) EXPECT_GT(seppalainen_rate(x + 0.1), seppalainen_rate(x));
  EXPECT_THROW(seppalainen_rate(1.9), Error);
}
