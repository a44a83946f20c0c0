#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/lpp.hpp"
#include "dlpp/spectral.hpp"

using namespace dlpp;

namespace {

double character(std::uint32_t s, std::uint32_t omega) {
  double c = 1.0;
  for (int v = 0; v < 32; ++v) {
    if (s >> v & 1U) c *= 2.0 * static_cast<double>(omega >> v & 1U) - 1.0;
  }
  return c;
}

}  // namespace

TEST(Spectral, ConstantFunction) {
  const auto t = fourier_walsh(std::vector<double>(16, 2.5));
  EXPECT_DOUBLE_EQ(t.alpha[0], 2.5);
  for (std::size_t s = 1; s < t.alpha.size(); ++s) EXPECT_EQ(t.alpha[s], 0.0);
  EXPECT_THROW(spectral_sample_law(t), Error);
  const auto inf = influence_sum(std::vector<double>(16, 2.5));
  EXPECT_EQ(inf.sum, 0.0);
  EXPECT_FALSE(inf.mean_spectral_size.has_value());
  EXPECT_THROW(inf.mean_size(), Error);
}

TEST(Spectral, DictatorAndParity) {
  const int cells = 5, v = 3;
  const auto dictator = tabulate(cells, [&](std::uint32_t w) { return 2.0 * (w >> v & 1U) - 1.0; });
  const auto t = fourier_walsh(dictator);
  for (std::size_t s = 0; s < t.alpha.size(); ++s) EXPECT_NEAR(t.alpha[s], s == (1U << v) ? 1.0 : 0.0, 1e-15);
  EXPECT_NEAR(spectral_sample_law(t).q[1U << v], 1.0, 1e-15);
  const auto inf = influence_sum(dictator);
  EXPECT_NEAR(inf.per_cell[v], 4.0, 1e-15);
  EXPECT_NEAR(inf.sum, 4.0, 1e-15);
  EXPECT_NEAR(inf.mean_size(), 1.0, 1e-15);
  for (double tt : {0.1, 1.0, 3.0}) {
    const auto c = stability_bound_check(dictator, t, tt);
    EXPECT_NEAR(c.lhs, 2.0 * (1.0 - std::exp(-tt)), 1e-12);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-12);
  }
  const auto parity = tabulate(cells, [&](std::uint32_t w) { return character(31, w); });
  EXPECT_NEAR(spectral_sample_law(fourier_walsh(parity)).q[31], 1.0, 1e-15);
}

TEST(Spectral, FastTransformMatchesNaiveOnLambdaOne) {
  const auto f = lpp_function_table(1);
  ASSERT_EQ(f.size(), 16u);
  const auto fast = fourier_walsh(f), slow = fourier_walsh_naive(f);
  for (std::size_t s = 0; s < 16; ++s) EXPECT_NEAR(fast.alpha[s], slow.alpha[s], 1e-12);
  // independent oracle: direct inner products written here
  for (std::uint32_t s = 0; s < 16; ++s) {
    double a = 0;
    for (std::uint32_t w = 0; w < 16; ++w) a += f[w] * character(s, w);
    EXPECT_NEAR(fast.alpha[s], a / 16.0, 1e-12);
  }
}

TEST(Spectral, LambdaOneCovarianceMatchesEnumeration) {
  const auto f = lpp_function_table(1);
  const auto t = fourier_walsh(f);
  EXPECT_NEAR(two_time_covariance(t, 0.0), t.variance, 1e-15);
  EXPECT_NEAR(two_time_covariance(t, 0.5), two_time_covariance_enumerated(f, 0.5), 1e-9);
  EXPECT_NEAR(two_time_covariance(t, 60.0), 0.0, 1e-12);
  for (double tt : {0.1, 1.0, 5.0}) {
    const auto c = stability_bound_check(f, t, tt);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-9);
  }
  EXPECT_THROW(two_time_covariance(t, -0.1), Error);
}

TEST(Spectral, LambdaTwoIdentities) {
  const auto f = lpp_function_table(2);
  ASSERT_EQ(f.size(), 512u);
  const auto t = fourier_walsh(f);
  double ef2 = 0;
  for (double x : f) ef2 += x * x;
  ef2 /= 512.0;
  double parseval = 0;
  for (double a : t.alpha) parseval += a * a;
  EXPECT_NEAR(parseval, ef2, 1e-9);
  EXPECT_NEAR(t.mean, t.alpha[0], 0.0);
  const auto back = reconstruct(t);
  for (std::size_t w = 0; w < 512; ++w) EXPECT_NEAR(back[w], f[w], 1e-9);
  const auto q = spectral_sample_law(t);
  double total = 0;
  for (double v : q.q) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_NEAR(influence_sum(f).mean_size(), q.mean_size(), 1e-9);
  for (double tt : {0.2, 1.0}) EXPECT_NEAR(two_time_covariance(t, tt), two_time_covariance_enumerated(f, tt), 1e-9);
  double prev = two_time_covariance(t, 0.0);
  for (double tt = 0.1; tt < 5.0; tt += 0.1) {
    const double c = two_time_covariance(t, tt);
    EXPECT_LE(c, prev + 1e-15);
    prev = c;
  }
}

TEST(Spectral, LpptableMatchesDynamicProgramming) {
  const auto f = lpp_function_table(2);
  for (std::uint32_t w = 0; w < 512; w += 37) {
    std::vector<double> v(9);
    for (int c = 0; c < 9; ++c) v[static_cast<std::size_t>(c)] = w >> c & 1U;
    EXPECT_EQ(f[w], full_route_geodesic(make_snapshot(FieldKind::bernoulli, 2, 1, v)).energy);
  }
}

TEST(Spectral, CharactersOrthonormal) {
  const int cells = 9;
  const std::uint32_t size = 1U << cells;
  for (std::uint32_t s = 0; s < size; s += 7) {
    for (std::uint32_t r = 0; r < size; ++r) {
      double acc = 0;
      for (std::uint32_t w = 0; w < size; ++w) acc += character(s, w) * character(r, w);
      ASSERT_EQ(acc / size, s == r ? 1.0 : 0.0);
    }
  }
}

TEST(Spectral, SizeGuards) {
  EXPECT_THROW(lpp_function_table(4), Error);
  EXPECT_THROW(fourier_walsh(std::vector<double>(3, 0.0)), Error);
}
