#include "dlpp/scaling.hpp"

#include <cmath>

#include "dlpp/error.hpp"

namespace dlpp {

double horizontal_unit(int n) { return 0.5 * std::pow(static_cast<double>(n), -2.0 / 3.0); }

double weight_unit(int n) { return std::pow(static_cast<double>(n), -1.0 / 3.0) / std::sqrt(2.0); }

ScaledPoint scale_point(int n, double v1, double v2) {
  require(n >= 1, ErrorCode::invalid_parameter, "n must be >= 1");
  return ScaledPoint{horizontal_unit(n) * (v1 - v2), v2 / n, n};
}

std::pair<double, double> unscale_point(int n, double x, double s) {
  require(n >= 1, ErrorCode::invalid_parameter, "n must be >= 1");
  const double ns = n * s;
  return {ns + 2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0) * x, ns};
}

Compatibility check_compatible_triple(int n, double s1, double s2, double x, double y) {
  if (n < 1) return {false, "grid"};
  const auto on_grid = [n](double s) { return std::abs(n * s - std::round(n * s)) <= 1e-9; };
  if (!on_grid(s1) || !on_grid(s2)) return {false, "grid"};
  if (s2 < s1 - 1e-12) return {false, "order"};
  const double s12 = s2 - s1;
  if (y - x < -0.5 * std::cbrt(static_cast<double>(n)) * s12 - 1e-12) return {false, "horizontal"};
  return {true, ""};
}

double weight_from_energy(int n, double energy, double s1, double s2, double x, double y) {
  const auto c = check_compatible_triple(n, s1, s2, x, y);
  require(c.ok, ErrorCode::invalid_parameter, "incompatible triple: " + c.reason);
  const double s12 = s2 - s1;
  return weight_unit(n) * (energy - 2.0 * n * s12 - 2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0) * (y - x));
}

double energy_from_weight(int n, double weight, double s1, double s2, double x, double y) {
  const auto c = check_compatible_triple(n, s1, s2, x, y);
  require(c.ok, ErrorCode::invalid_parameter, "incompatible triple: " + c.reason);
  const double s12 = s2 - s1;
  return weight / weight_unit(n) + 2.0 * n * s12 + 2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0) * (y - x);
}

namespace {
double unscaled_x(const LatticePath& p, int grid_x) {
  return static_cast<double>(grid_x) / static_cast<double>(p.m);
}
}  // namespace

ScaledPoint path_start(const LatticePath& p) {
  return scale_point(p.n, unscaled_x(p, p.src.x), p.src.level);
}

ScaledPoint path_end(const LatticePath& p) {
  return scale_point(p.n, unscaled_x(p, p.dst.x), p.dst.level);
}

double scaled_departure(const LatticePath& p, int level) {
  return horizontal_unit(p.n) * (unscaled_x(p, p.departure(level)) - level);
}

double path_weight(const LatticePath& p) {
  const auto a = path_start(p);
  const auto b = path_end(p);
  return weight_from_energy(p.n, p.energy, a.s, b.s, a.x, b.x);
}

Zigzag to_zigzag(const LatticePath& p) {
  Zigzag z;
  z.n = p.n;
  z.start = path_start(p);
  z.end = path_end(p);
  z.phi.reserve(p.dep.size());
  for (int level = p.src.level; level <= p.dst.level; ++level) z.phi.push_back(scaled_departure(p, level));
  z.weight = path_weight(p);
  return z;
}

}  // namespace dlpp
