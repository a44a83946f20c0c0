#include <gtest/gtest.h>

#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/harness.hpp"

using namespace dlpp;

namespace {

RunOptions opts(long samples, std::uint64_t seed, int threads = 1) { return RunOptions{samples, seed, threads}; }

}  // namespace

TEST(Estimate, MeanAndSem) {
  const auto e = estimate_of({1.0, 2.0, 3.0, 4.0}, 9);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.sem, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.n_samples, 4);
  EXPECT_EQ(e.seed_root, 9u);
}

TEST(Quadrature, ExactForLinearIntegrands) {
  const auto t = quadratic_grid(20.0, 40);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 20.0);
  std::vector<double> g;
  for (double x : t) g.push_back(3.0 - 0.1 * x);
  const double T = 20.0;
  const double exact = 3.0 * (1 - std::exp(-T)) - 0.1 * (1 - std::exp(-T) * (1 + T));
  EXPECT_NEAR(exp_weighted_trapezoid(t, g), exact, 1e-12);
  EXPECT_GT(std::abs(plain_trapezoid(t, g) - exact), 1e-6);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  const std::function<double(long)> f = [](long i) { return std::sqrt(static_cast<double>(i)); };
  EXPECT_EQ(parallel_samples<double>(101, 1, f), parallel_samples<double>(101, 4, f));
  const std::function<double(long)> bad = [](long i) -> double {
    if (i == 7) throw Error(ErrorCode::domain_error, "boom");
    return 0.0;
  };
  EXPECT_THROW(parallel_samples<double>(20, 3, bad), Error);
}

TEST(DynamicalVariance, TwoPathGaussianModel) {
  const auto grid = quadratic_grid(20.0, 40);
  const auto r = check_dynamical_variance(FieldKind::gaussian, 1, std::nullopt, grid, 20.0, opts(100000, 3));
  EXPECT_EQ(r.verdict, Verdict::pass) << r.lhs.mean << " vs " << r.rhs.mean;
  EXPECT_LT(r.detail("tail_bound"), 1e-7 * 3.0 + 1e-12);
}

TEST(DynamicalVariance, DegenerateGridIsInconclusive) {
  const auto r = check_dynamical_variance(FieldKind::gaussian, 2, std::nullopt, {0.0}, 20.0, opts(1000, 3));
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_THROW(check_dynamical_variance(FieldKind::gaussian, 2, std::nullopt, {1.0, 0.5}, 20.0, opts(1000, 3)), Error);
  EXPECT_THROW(check_dynamical_variance(FieldKind::bernoulli, 2, std::nullopt, {0.0, 1.0}, 20.0, opts(1000, 3)), Error);
}

TEST(OverlapMonotone, SmallBernoulli) {
  const auto r = check_mean_overlap_monotone(FieldKind::bernoulli, 10, std::nullopt, 0.5, {0, 0.05, 0.1, 0.2, 0.5, 1, 2},
                                             opts(2000, 4));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.detail("t0_equals_max"), 1.0);
  EXPECT_EQ(r.rows.size(), 7u);
}

TEST(WeightStability, SingleColumnRouteHasNoChange) {
  const auto r = check_weight_stability_fixed(8, 4, {2.0, 0, 2.0, 8}, {0.1, 1.0}, opts(100, 5));
  EXPECT_EQ(r.lhs.mean, 0.0);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(WeightStability, FixedModeSmall) {
  const auto r = check_weight_stability_fixed(4, 4, {0.0, 0, 4.0, 4}, {0.05, 0.1, 0.2}, opts(2000, 6));
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(WeightStability, GridModeIsMeasurementOnly) {
  const double n = 64;
  const auto r = check_weight_stability_grid(64, 2, 3, 1.0 / std::cbrt(n), opts(30, 7));
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_EQ(r.detail("crude_bound_holds"), 1.0);
  EXPECT_GE(r.detail("sup_delta_max"), 0.0);
}

TEST(Sweep, NearIdentityDynamicsKeepsFullOverlap) {
  const auto pts = transition_sweep(FieldKind::gaussian, {20}, {1e-8, 1.0}, std::nullopt, std::nullopt, opts(300, 8));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].overlap.mean, 1.0, 3 * pts[0].overlap.sem + 1e-12);
  EXPECT_LT(pts[1].overlap.mean, pts[0].overlap.mean);
}

TEST(Sweep, ReproducibleAcrossThreadCounts) {
  const auto a = transition_sweep(FieldKind::bernoulli, {12, 20}, {0.5, 0.1, 2.0}, std::nullopt, 0.5, opts(200, 9, 1));
  const auto b = transition_sweep(FieldKind::bernoulli, {12, 20}, {0.5, 0.1, 2.0}, std::nullopt, 0.5, opts(200, 9, 3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].overlap.mean, b[i].overlap.mean);
    EXPECT_EQ(a[i].overlap.sem, b[i].overlap.sem);
  }
}

TEST(Exponents, SyntheticSlope) {
  std::vector<double> x, y;
  for (double n : {128.0, 256.0, 512.0, 1024.0, 2048.0}) {
    x.push_back(n);
    y.push_back(0.7 * std::pow(n, 2.0 / 3.0));
  }
  EXPECT_NEAR(log_log_slope(x, y), 2.0 / 3.0, 1e-6);
  EXPECT_THROW(log_log_slope({1.0, 2.0}, {1.0, -1.0}), Error);
}

TEST(Exponents, RangeRequirement) {
  EXPECT_THROW(exponent_fit(FieldKind::bernoulli, {16, 32, 64, 128}, std::nullopt, 0.5, opts(10, 1)), Error);
  EXPECT_THROW(exponent_fit(FieldKind::bernoulli, {16, 160, 200}, std::nullopt, 0.5, opts(10, 1)), Error);
  const auto r = exponent_fit(FieldKind::bernoulli, {8, 16, 32, 64, 128}, std::nullopt, 0.5, opts(60, 2), 50);
  EXPECT_LE(r.chi_transversal.lo, r.chi_transversal.hi);
  EXPECT_EQ(r.max_fluc.size(), 5u);
}

TEST(TwinPeaks, ZeroSigmaAndMonotonicity) {
  TwinPeaksParams p;
  p.sigmas = {0.0, 0.1, 0.4, 0.8};
  const auto r = twin_peaks_and_deficit(32, 8, p, opts(200, 10));
  EXPECT_EQ(r.probability[0].mean, 0.0);
  EXPECT_TRUE(r.monotone);
  for (std::size_t i = 1; i < r.probability.size(); ++i) EXPECT_GE(r.probability[i].mean, r.probability[i - 1].mean);
  EXPECT_FALSE(r.deficits.empty());
  for (double d : r.deficits) EXPECT_GE(d, 0.0);
  EXPECT_THROW(twin_peaks_and_deficit(32, 1, p, opts(10, 1)), Error);
  p.a = 0.3;
  EXPECT_THROW(twin_peaks_and_deficit(32, 8, p, opts(10, 1)), Error);
}

TEST(Refinement, ChainChecks) {
  const auto r = refinement_check(4, {2, 4, 8, 16}, opts(100, 11));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.detail("monotone_failures"), 0.0);
  EXPECT_THROW(refinement_check(4, {2, 6}, opts(10, 1)), Error);
}

TEST(ExcursionAdditivity, TimeZeroAndRandom) {
  const auto z = excursion_additivity_check(16, 2, 0.0, opts(20, 12));
  EXPECT_EQ(z.detail("mean_excursions"), 0.0);
  EXPECT_LT(z.detail("max_identity_error"), 1e-9);
  const auto r = excursion_additivity_check(32, 2, 0.3, opts(50, 13));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_GT(r.detail("mean_excursions"), 0.0);
}

TEST(TwoTimeCovariance, MonteCarloAgreesWithSpectrum) {
  const auto r = check_two_time_covariance_mc(1, 0.5, opts(40000, 14));
  EXPECT_EQ(r.verdict, Verdict::pass) << r.lhs.mean << " vs " << r.rhs.mean;
}

TEST(ProxyCheck, TimeZeroHasNoStrictWins) {
  const auto r = proxy_check(64, 2, 0.0, ProxyParams{}, 0.9, opts(10, 15));
  EXPECT_EQ(r.detail("min_retention"), 1.0);
  EXPECT_EQ(r.detail("win_fraction"), 0.0);
  EXPECT_EQ(r.verdict, Verdict::fail);
}
