#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dlpp/noise.hpp"
#include "dlpp/proxy.hpp"

namespace dlpp {

struct Estimate {
  double mean = 0.0;
  double sem = 0.0;
  long n_samples = 0;
  std::uint64_t seed_root = 0;
};

/// Sample mean and standard error (sample sd / sqrt(n)).
Estimate estimate_of(const std::vector<double>& xs, std::uint64_t seed_root = 0);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// One CSV row: model,n,m,param,t,tau,estimate,sem,samples,seed.
struct ResultRow {
  std::string model;
  int n = 0;
  int m = 0;
  std::string param;
  double t = 0.0;
  double tau = 0.0;
  double estimate = 0.0;
  double sem = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
};

struct CheckReport {
  std::string name;
  Estimate lhs;
  Estimate rhs;
  Verdict verdict = Verdict::inconclusive;
  std::string tolerance_policy;
  std::vector<std::pair<std::string, double>> details;
  std::vector<ResultRow> rows;

  double detail(const std::string& key) const;
};

/// Runs fn(i) for i in [0, count) on `threads` workers; results are stored by index.
template <class T>
std::vector<T> parallel_samples(long count, int threads, const std::function<T(long)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(count, 1))));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        // Strided partition: deterministic assignment, results placed by index.
        for (long i = w; i < count; i += workers) out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

int default_threads();

struct RunOptions {
  long samples = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// Checks

/// Quadratically spaced grid t_k = T_max (k/(K-1))^2, k = 0..K-1.
std::vector<double> quadratic_grid(double t_max, int points);

/// Integral of e^{-t} g(t) with g linear between grid points; exact in the weight.
double exp_weighted_trapezoid(const std::vector<double>& t, const std::vector<double>& g);
double plain_trapezoid(const std::vector<double>& t, const std::vector<double>& g);

CheckReport check_dynamical_variance(FieldKind kind, int n, std::optional<int> m,
                                     const std::vector<double>& t_grid, double t_max,
                                     const RunOptions& opt);

CheckReport check_mean_overlap_monotone(FieldKind kind, int n, std::optional<int> m, std::optional<double> p,
                                        const std::vector<double>& t_grid, const RunOptions& opt);

struct StabilityEndpoints {
  double x = 0.0;  ///< unscaled start column
  int i = 0;
  double y = 0.0;  ///< unscaled end column
  int j = 0;
};

/// Fixed mode: E|M^t - M^0|^2 <= 2|x-y| t + 3 sem at every t.
CheckReport check_weight_stability_fixed(int n, int m, StabilityEndpoints ends, const std::vector<double>& ts,
                                         const RunOptions& opt);

/// Grid mode (measurement only): sup over the endpoint grid of h^{-1/3}|Delta^{0,t}|, and the
/// crude bound sup |Wgt^t - Wgt^0| <= 4 n^{1/2} over sampled zigzags.
CheckReport check_weight_stability_grid(int n, int m, int grid_points, double t, const RunOptions& opt);

struct SweepPoint {
  int n = 0;
  double tau = 0.0;
  Estimate overlap;
};

std::vector<SweepPoint> transition_sweep(FieldKind kind, const std::vector<int>& n_list,
                                         const std::vector<double>& tau_grid, std::optional<int> m,
                                         std::optional<double> p, const RunOptions& opt);

struct SlopeFit {
  double slope = 0.0;
  double lo = 0.0;  ///< bootstrap 2.5% quantile
  double hi = 0.0;  ///< bootstrap 97.5% quantile
};

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ExponentResult {
  SlopeFit chi_transversal;
  SlopeFit chi_weight;
  std::vector<int> n_list;
  std::vector<Estimate> max_fluc;  ///< unscaled MaxFluc per n
  std::vector<double> weight_sd;   ///< sd(M - 2n) per n
};

ExponentResult exponent_fit(FieldKind kind, const std::vector<int>& n_list, std::optional<int> m,
                            std::optional<double> p, const RunOptions& opt, int bootstrap = 1000,
                            int fit_last = 4);

struct TwinPeaksParams {
  double a = 0.5;
  std::vector<double> sigmas;
  double window_lo = 1.0;
  double window_hi = 2.0;
  double annulus_lo = 0.0;  ///< 0 selects the default 8^{-1} beta1 n^{-2/3}
  double annulus_hi = 0.0;  ///< 0 selects the default n^{-2/3 + 2 beta/3} (log n)^{1/3}
  double beta1 = 0.1;
  double beta = 0.1;
};

struct TwinPeaksResult {
  std::vector<Estimate> probability;  ///< per sigma
  double slope = 0.0;                 ///< log-log slope over sigmas with P > 0
  bool monotone = true;
  std::vector<double> deficits;       ///< per-sample level deficit
  Estimate deficit;
};

TwinPeaksResult twin_peaks_and_deficit(int n, int m, const TwinPeaksParams& params, const RunOptions& opt);

CheckReport refinement_check(int n, const std::vector<int>& m_list, const RunOptions& opt);

CheckReport excursion_additivity_check(int n, int m, double t, const RunOptions& opt);

/// Monte Carlo Cov(M^0, M^t) on Lambda_n with Bernoulli(1/2) against the exact spectral value.
CheckReport check_two_time_covariance_mc(int n, double t, const RunOptions& opt);

/// Proxy mimicry over independent instances at time t: retention >= 1/2 on every instance and
/// weight_gap < baseline_gap in at least `min_fraction` of them.
CheckReport proxy_check(int n, int m, double t, const ProxyParams& params, double min_fraction,
                        const RunOptions& opt);

}  // namespace dlpp
