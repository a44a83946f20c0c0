#include <gtest/gtest.h>

#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/scaling.hpp"

using namespace dlpp;

TEST(Scaling, RouteEndpoints) {
  for (int n : {1, 8, 100}) {
    const auto a = scale_point(n, 0, 0);
    const auto b = scale_point(n, n, n);
    EXPECT_EQ(a.x, 0.0);
    EXPECT_EQ(a.s, 0.0);
    EXPECT_NEAR(b.x, 0.0, 1e-15);
    EXPECT_EQ(b.s, 1.0);
  }
}

TEST(Scaling, DirectEvaluation) {
  const auto p = scale_point(8, 12, 8);
  EXPECT_NEAR(p.x, 0.5, 1e-12);
  EXPECT_NEAR(p.s, 1.0, 1e-12);
}

TEST(Scaling, RoundTrip) {
  const CounterRng rng(1, 0, Tag::test);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform(i, 0) * 2000);
    const double v1 = rng.uniform(i, 1) * 3000 - 500, v2 = rng.uniform(i, 2) * 3000;
    const auto p = scale_point(n, v1, v2);
    const auto [w1, w2] = unscale_point(n, p.x, p.s);
    ASSERT_NEAR(w1, v1, 1e-9);
    ASSERT_NEAR(w2, v2, 1e-9);
  }
}

TEST(Scaling, WeightCentering) {
  EXPECT_NEAR(weight_from_energy(8, 16, 0, 1, 0, 0), 0.0, 1e-15);
  const double delta = 0.37;
  EXPECT_NEAR(weight_from_energy(8, 16 + delta, 0, 1, 0, 0), delta / std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Scaling, WeightIndependentFormula) {
  // n = 64: n^{1/3} = 4, n^{2/3} = 16
  const double expect = (33.0 - 2.0 * 64.0 * 0.5 - 2.0 * 16.0 * 0.3) / (std::sqrt(2.0) * 4.0);
  EXPECT_NEAR(weight_from_energy(64, 33, 0.25, 0.75, 0.0, 0.3), expect, 1e-12);
  EXPECT_NEAR(energy_from_weight(64, expect, 0.25, 0.75, 0.0, 0.3), 33.0, 1e-12);
}

TEST(Scaling, CompatibleTriples) {
  EXPECT_TRUE(check_compatible_triple(10, 0.2, 0.7, 0, 0).ok);
  EXPECT_EQ(check_compatible_triple(10, 0.25, 0.7, 0, 0).reason, "grid");
  EXPECT_EQ(check_compatible_triple(8, 0, 1, 0, -1.01).reason, "horizontal");
  EXPECT_TRUE(check_compatible_triple(8, 0, 1, 0, -1.0).ok);
  EXPECT_EQ(check_compatible_triple(8, 0.5, 0.25, 0, 0).reason, "order");
  EXPECT_THROW(weight_from_energy(8, 0, 0, 1, 0, -2), Error);
}

TEST(Scaling, ZigzagOfMeshGeodesic) {
  const int n = 16, m = 4;
  const auto snap = make_env(FieldKind::brownian_mesh, n, m, std::nullopt, 3, 0).snapshot(0.0);
  const LatticePath g = full_route_geodesic(snap);
  const Zigzag z = to_zigzag(g);
  ASSERT_EQ(z.phi.size(), static_cast<std::size_t>(n + 1));
  EXPECT_NEAR(z.phi.back(), 0.0, 1e-12);
  for (std::size_t i = 1; i < z.phi.size(); ++i) EXPECT_GE(z.phi[i], z.phi[i - 1] - horizontal_unit(n) - 1e-12);
  EXPECT_NEAR(energy_from_weight(n, z.weight, 0, 1, 0, 0), g.energy, 1e-9);
}

TEST(Scaling, WeightAdditiveUnderConcatenation) {
  const int n = 16, m = 4;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto snap = make_env(FieldKind::brownian_mesh, n, m, std::nullopt, 4, s).snapshot(0.0);
    const LatticePath g = full_route_geodesic(snap);
    const GridPoint mid{g.departure(7), 7};
    const double w = path_weight(max_energy_mesh(snap, g.src, mid)) + path_weight(max_energy_mesh(snap, mid, g.dst));
    ASSERT_NEAR(w, path_weight(g), 1e-9);
  }
}
