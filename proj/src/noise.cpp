#include "dlpp/noise.hpp"

#include <algorithm>
#include <cmath>

#include "dlpp/error.hpp"

namespace dlpp {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::bernoulli: return "bernoulli";
    case FieldKind::uniform: return "uniform";
    case FieldKind::gaussian: return "gaussian";
    case FieldKind::brownian_mesh: return "brownian-mesh";
  }
  return "unknown";
}

FieldKind parse_field_kind(const std::string& name) {
  if (name == "bernoulli") return FieldKind::bernoulli;
  if (name == "uniform") return FieldKind::uniform;
  if (name == "gaussian") return FieldKind::gaussian;
  if (name == "brownian-mesh" || name == "mesh") return FieldKind::brownian_mesh;
  throw Error(ErrorCode::invalid_parameter, "unknown model kind: " + name);
}

FieldSnapshot make_snapshot(FieldKind kind, int n, int m, std::vector<double> values, double t) {
  require(n >= 1, ErrorCode::invalid_parameter, "n must be >= 1");
  require(m >= 1, ErrorCode::invalid_parameter, "m must be >= 1");
  require(kind == FieldKind::brownian_mesh || m == 1, ErrorCode::invalid_parameter,
          "lattice snapshots have m = 1");
  FieldSnapshot s;
  s.kind = kind;
  s.n = n;
  s.m = m;
  s.t = t;
  const std::size_t expect =
      static_cast<std::size_t>(s.width()) * static_cast<std::size_t>(s.levels());
  require(values.size() == expect, ErrorCode::invalid_parameter, "snapshot shape mismatch");
  s.values = std::move(values);
  return s;
}

DynEnv::DynEnv(FieldKind kind, int n, int m, double p, std::uint64_t seed, std::uint64_t stream_id)
    : p_(p), seed_(seed), stream_(stream_id), rng_(seed, stream_id, Tag::field) {
  state_.kind = kind;
  state_.n = n;
  state_.m = kind == FieldKind::brownian_mesh ? m : 1;
  state_.t = 0.0;
  state_.values.assign(
      static_cast<std::size_t>(state_.width()) * static_cast<std::size_t>(state_.levels()), 0.0);
  draw_initial();
}

void DynEnv::draw_initial() {
  auto& v = state_.values;
  const std::size_t size = v.size();
  switch (state_.kind) {
    case FieldKind::bernoulli:
      for (std::size_t c = 0; c < size; ++c) v[c] = rng_.uniform(0, c) < p_ ? 1.0 : 0.0;
      break;
    case FieldKind::uniform:
      for (std::size_t c = 0; c < size; ++c) v[c] = rng_.uniform(0, c);
      break;
    case FieldKind::gaussian:
    case FieldKind::brownian_mesh: {
      const double sigma = state_.kind == FieldKind::gaussian ? 1.0 : 1.0 / std::sqrt(state_.m);
      for (std::size_t c = 0; c < size; c += 2) {
        const auto [a, b] = rng_.normal_pair(0, c / 2);
        v[c] = sigma * a;
        if (c + 1 < size) v[c + 1] = sigma * b;
      }
      break;
    }
  }
}

void DynEnv::transition(double dt) {
  const std::uint64_t k = ++transitions_;
  auto& v = state_.values;
  const std::size_t size = v.size();
  const double keep = std::exp(-dt);
  switch (state_.kind) {
    case FieldKind::bernoulli:
    case FieldKind::uniform: {
      const double redraw = -std::expm1(-dt);
      const bool bern = state_.kind == FieldKind::bernoulli;
      for (std::size_t c = 0; c < size; ++c) {
        const std::uint64_t h = rng_.bits(k, c);
        if (CounterRng::to_unit(h) < redraw) {
          const double u = CounterRng::to_unit(mix64(h));
          v[c] = bern ? (u < p_ ? 1.0 : 0.0) : u;
        }
      }
      break;
    }
    case FieldKind::gaussian:
    case FieldKind::brownian_mesh: {
      const double sigma = state_.kind == FieldKind::gaussian ? 1.0 : 1.0 / std::sqrt(state_.m);
      const double noise = sigma * std::sqrt(-std::expm1(-2.0 * dt));
      for (std::size_t c = 0; c < size; c += 2) {
        const auto [a, b] = rng_.normal_pair(k, c / 2);
        v[c] = keep * v[c] + noise * a;
        if (c + 1 < size) v[c + 1] = keep * v[c + 1] + noise * b;
      }
      break;
    }
  }
}

const FieldSnapshot& DynEnv::advance(double t) {
  require(std::isfinite(t), ErrorCode::invalid_parameter, "snapshot time must be finite");
  require(t >= state_.t, ErrorCode::time_regression, "snapshot time precedes env clock");
  if (t > state_.t) {
    transition(t - state_.t);
    state_.t = t;
  }
  return state_;
}

DynEnv make_env(FieldKind kind, int n, std::optional<int> m, std::optional<double> p,
                std::uint64_t seed, std::uint64_t stream_id) {
  require(n >= 1, ErrorCode::invalid_parameter, "n must be >= 1");
  int mm = 1;
  if (kind == FieldKind::brownian_mesh) {
    require(m.has_value(), ErrorCode::invalid_parameter, "mesh kind needs m");
    require(*m >= 1, ErrorCode::invalid_parameter, "m must be >= 1");
    mm = *m;
  } else {
    require(!m.has_value(), ErrorCode::invalid_parameter, "m given for a lattice kind");
  }
  double pp = 0.5;
  if (kind == FieldKind::bernoulli) {
    if (p) pp = *p;
    require(pp > 0.0 && pp <= 1.0, ErrorCode::invalid_parameter, "p must lie in (0,1]");
  } else {
    require(!p.has_value(), ErrorCode::invalid_parameter, "p given for a non-Bernoulli kind");
  }
  return DynEnv(kind, n, mm, pp, seed, stream_id);
}

// ---------------------------------------------------------------------------
// Dyadic construction

int dyadic_outer_scale(double x_abs_max) {
  // Coarse scales j < -J contribute x^2 2^{-J} at |x| <= 2^{J-1}.
  if (x_abs_max <= 0.0) return 0;
  const double need = std::log2(x_abs_max * x_abs_max * 1e6);
  const double range = std::log2(x_abs_max) + 1.0;
  return static_cast<int>(std::ceil(std::max({need, range, 0.0})));
}

double dyadic_tent(int j, std::int64_t k, double x) {
  const double w = std::ldexp(1.0, -j);
  const double lo = static_cast<double>(k) * w;
  const double d = x - lo;
  if (d <= 0.0 || d >= w) return 0.0;
  const double slope = std::sqrt(std::ldexp(1.0, j));
  return slope * (d <= 0.5 * w ? d : w - d);
}

std::vector<std::vector<double>> sample_dyadic_ou(const std::vector<double>& xs,
                                                  const std::vector<double>& ts, int j_max,
                                                  std::uint64_t seed) {
  require(j_max >= 0, ErrorCode::invalid_parameter, "j_max must be >= 0");
  double xmax = 0.0;
  for (double x : xs) {
    require(std::isfinite(x) && std::abs(x) <= kDyadicRange, ErrorCode::out_of_range,
            "x outside the dyadic truncation range");
    xmax = std::max(xmax, std::abs(x));
  }
  for (std::size_t r = 0; r < ts.size(); ++r) {
    require(std::isfinite(ts[r]) && ts[r] >= 0.0, ErrorCode::invalid_parameter,
            "times must be finite and >= 0");
    require(r == 0 || ts[r] >= ts[r - 1], ErrorCode::time_regression, "times must be non-decreasing");
  }
  const int j_outer = dyadic_outer_scale(xmax);
  const CounterRng rng(seed, 0, Tag::dyadic);
  // Coefficient zeta_I at time index r, keyed by (scale, index, r); OU recursion from r = 0.
  std::vector<double> keep(ts.size(), 1.0), noise(ts.size(), 0.0);
  for (std::size_t r = 1; r < ts.size(); ++r) {
    const double dt = ts[r] - ts[r - 1];
    keep[r] = std::exp(-dt);
    noise[r] = std::sqrt(-std::expm1(-2.0 * dt));
  }
  std::vector<std::vector<double>> out(ts.size(), std::vector<double>(xs.size(), 0.0));
  std::vector<double> zeta(ts.size());
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    const double x = xs[xi];
    for (int j = -j_outer; j <= j_max; ++j) {
      const std::int64_t k = static_cast<std::int64_t>(std::floor(std::ldexp(x, j)));
      const double f = dyadic_tent(j, k, x);
      if (f == 0.0) continue;
      const std::uint64_t id = mix64(static_cast<std::uint64_t>(j + 4096)) ^
                               static_cast<std::uint64_t>(k) * 0x9e3779b97f4a7c15ULL;
      double z = rng.normal(id, 0);
      for (std::size_t r = 0; r < ts.size(); ++r) {
        if (r > 0) z = keep[r] * z + noise[r] * rng.normal(id, r);
        out[r][xi] += z * f;
      }
    }
  }
  return out;
}

}  // namespace dlpp
