#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace dlpp {

inline constexpr int kMaxSpectralCells = 20;

/// Exact Fourier-Walsh coefficients of f on {0,1}^N, subsets as bitmasks.
struct SpectralTable {
  int cells = 0;
  std::vector<double> alpha;  ///< alpha[S] for S in [0, 2^cells)
  double mean = 0.0;          ///< alpha(empty)
  double variance = 0.0;      ///< sum over nonempty S of alpha(S)^2
};

struct SpectralSampleLaw {
  int cells = 0;
  std::vector<double> q;  ///< q[S], q[0] = 0
  double mean_size() const;
};

/// Table of f(omega) over all 2^N configurations; bit v of the index is omega(v).
std::vector<double> tabulate(int cells, const std::function<double(std::uint32_t)>& f);

/// Maximum upright energy (0,0) -> (n,n) as a Boolean function on Lambda_n; cell v = level*(n+1)+x.
std::vector<double> lpp_function_table(int n);

/// Fast butterfly transform, O(N 2^N).
SpectralTable fourier_walsh(const std::vector<double>& f);

/// Direct O(4^N) inner products; test oracle.
SpectralTable fourier_walsh_naive(const std::vector<double>& f);

/// f(omega) = sum_S alpha(S) chi_S(omega), evaluated for every omega.
std::vector<double> reconstruct(const SpectralTable& table);

double two_time_covariance(const SpectralTable& table, double t);

/// Exact sum over (omega, omega') of P(omega) P_t(omega -> omega') centred products.
double two_time_covariance_enumerated(const std::vector<double>& f, double t);

/// E (f(omega^0) - f(omega^t))^2 by exact enumeration.
double two_time_square_difference_enumerated(const std::vector<double>& f, double t);

SpectralSampleLaw spectral_sample_law(const SpectralTable& table);

struct InfluenceResult {
  std::vector<double> per_cell;  ///< E (f - f[v])^2
  double sum = 0.0;
  std::optional<double> mean_spectral_size;  ///< sum / (4 Var); empty for constant f

  /// Normalized value; throws domain_error for zero-variance functions.
  double mean_size() const;
};

InfluenceResult influence_sum(const std::vector<double>& f);

struct StabilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs by enumeration, rhs = 2 Var (1 - E_Q e^{-t|S|}).
StabilityCheck stability_bound_check(const std::vector<double>& f, const SpectralTable& table, double t);

}  // namespace dlpp
