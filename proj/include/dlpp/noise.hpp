#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlpp/rng.hpp"

namespace dlpp {

enum class FieldKind { bernoulli, uniform, gaussian, brownian_mesh };

std::string to_string(FieldKind kind);
FieldKind parse_field_kind(const std::string& name);
inline bool is_lattice(FieldKind k) { return k != FieldKind::brownian_mesh; }

/// Dense field at one dynamic time.
/// Lattice kinds: (n+1) x (n+1) vertex values, row-major by level.
/// Mesh kind: (n*m) x (n+1) horizontal edge increments, edge u = k/m on level i at [i*n*m + k].
struct FieldSnapshot {
  FieldKind kind = FieldKind::gaussian;
  int n = 0;
  int m = 1;
  double t = 0.0;
  std::vector<double> values;

  int width() const { return kind == FieldKind::brownian_mesh ? n * m : n + 1; }
  int levels() const { return n + 1; }
  double at(int x, int level) const {
    return values[static_cast<std::size_t>(level) * static_cast<std::size_t>(width()) +
                  static_cast<std::size_t>(x)];
  }
  double& at(int x, int level) {
    return values[static_cast<std::size_t>(level) * static_cast<std::size_t>(width()) +
                  static_cast<std::size_t>(x)];
  }
};

/// Shape-checked constructor for hand-built snapshots (tests, coarsening).
FieldSnapshot make_snapshot(FieldKind kind, int n, int m, std::vector<double> values, double t = 0.0);

/// Forward-evolving dynamical noise environment.
/// Single owner; snapshot times must be non-decreasing.
class DynEnv {
 public:
  DynEnv(FieldKind kind, int n, int m, double p, std::uint64_t seed, std::uint64_t stream_id);

  /// Advances the clock to t and returns the internal state (valid until the next call).
  const FieldSnapshot& advance(double t);
  /// Advances the clock to t and returns an immutable copy.
  FieldSnapshot snapshot(double t) { return advance(t); }

  const FieldSnapshot& current() const { return state_; }
  double clock() const { return state_.t; }
  FieldKind kind() const { return state_.kind; }
  int n() const { return state_.n; }
  int m() const { return state_.m; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void draw_initial();
  void transition(double dt);

  FieldSnapshot state_;
  double p_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t transitions_ = 0;
  CounterRng rng_;
};

/// Validating factory: m only for the mesh kind, p only for Bernoulli.
DynEnv make_env(FieldKind kind, int n, std::optional<int> m, std::optional<double> p,
                std::uint64_t seed, std::uint64_t stream_id);

/// Largest |x| accepted by sample_dyadic_ou.
inline constexpr double kDyadicRange = 65536.0;

/// Coarsest scale index used so that omitted coarse scales carry < 1e-6 variance at x_abs_max.
int dyadic_outer_scale(double x_abs_max);

/// Tent function f_I for I = [k 2^{-j}, (k+1) 2^{-j}].
double dyadic_tent(int j, std::int64_t k, double x);

/// OU-on-Brownian field W(x,t) from truncated dyadic tent expansion; result[ti][xi].
std::vector<std::vector<double>> sample_dyadic_ou(const std::vector<double>& xs,
                                                  const std::vector<double>& ts, int j_max,
                                                  std::uint64_t seed);

}  // namespace dlpp
