#include "dlpp/spectral.hpp"

#include <bit>
#include <cmath>

#include "dlpp/error.hpp"
#include "dlpp/lpp.hpp"
#include "dlpp/noise.hpp"

namespace dlpp {

namespace {

int cells_of(std::size_t size) {
  require(size >= 1 && std::has_single_bit(size), ErrorCode::invalid_parameter,
          "function table size must be a power of two");
  const int cells = std::countr_zero(size);
  require(cells <= kMaxSpectralCells, ErrorCode::instance_too_large, "lattice too large (> 20 cells)");
  return cells;
}

double chi(std::uint32_t s, std::uint32_t omega) {
  // chi_S(omega) = prod_{v in S} (2 omega(v) - 1): sign from the zeros of omega inside S.
  return (std::popcount(s & ~omega) & 1U) ? -1.0 : 1.0;
}

void finish(SpectralTable& t) {
  t.mean = t.alpha[0];
  double v = 0.0;
  for (std::size_t s = 1; s < t.alpha.size(); ++s) v += t.alpha[s] * t.alpha[s];
  t.variance = v;
}

double f_mean(const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

}  // namespace

double SpectralSampleLaw::mean_size() const {
  double s = 0.0;
  for (std::size_t S = 1; S < q.size(); ++S) s += q[S] * std::popcount(static_cast<std::uint32_t>(S));
  return s;
}

std::vector<double> tabulate(int cells, const std::function<double(std::uint32_t)>& f) {
  require(cells >= 0 && cells <= kMaxSpectralCells, ErrorCode::instance_too_large, "lattice too large (> 20 cells)");
  std::vector<double> out(std::size_t{1} << cells);
  for (std::uint32_t w = 0; w < out.size(); ++w) out[w] = f(w);
  return out;
}

std::vector<double> lpp_function_table(int n) {
  require(n >= 1, ErrorCode::invalid_parameter, "n must be >= 1");
  const int cells = (n + 1) * (n + 1);
  require(cells <= kMaxSpectralCells, ErrorCode::instance_too_large, "lattice too large (> 20 cells)");
  FieldSnapshot snap = make_snapshot(FieldKind::bernoulli, n, 1, std::vector<double>(static_cast<std::size_t>(cells), 0.0));
  return tabulate(cells, [&](std::uint32_t omega) {
    for (int v = 0; v < cells; ++v) snap.values[static_cast<std::size_t>(v)] = (omega >> v) & 1U ? 1.0 : 0.0;
    return max_energy_upright(snap, GridPoint{0, 0}, GridPoint{n, n}).energy;
  });
}

SpectralTable fourier_walsh(const std::vector<double>& f) {
  SpectralTable t;
  t.cells = cells_of(f.size());
  t.alpha = f;
  const std::size_t size = f.size();
  // In-place Walsh-Hadamard butterfly with the chi sign convention (bit 1 -> +1).
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t i = 0; i < size; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x0 = t.alpha[j];       // omega(v) = 0 entry
        const double x1 = t.alpha[j + h];   // omega(v) = 1 entry
        t.alpha[j] = x1 + x0;               // v not in S
        t.alpha[j + h] = x1 - x0;           // v in S
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(size);
  for (auto& a : t.alpha) a *= scale;
  finish(t);
  return t;
}

SpectralTable fourier_walsh_naive(const std::vector<double>& f) {
  SpectralTable t;
  t.cells = cells_of(f.size());
  const std::size_t size = f.size();
  t.alpha.assign(size, 0.0);
  for (std::uint32_t s = 0; s < size; ++s) {
    double acc = 0.0;
    for (std::uint32_t w = 0; w < size; ++w) acc += f[w] * chi(s, w);
    t.alpha[s] = acc / static_cast<double>(size);
  }
  finish(t);
  return t;
}

std::vector<double> reconstruct(const SpectralTable& table) {
  const std::size_t size = table.alpha.size();
  std::vector<double> f(size, 0.0);
  for (std::uint32_t w = 0; w < size; ++w) {
    double acc = 0.0;
    for (std::uint32_t s = 0; s < size; ++s) acc += table.alpha[s] * chi(s, w);
    f[w] = acc;
  }
  return f;
}

double two_time_covariance(const SpectralTable& table, double t) {
  require(t >= 0.0, ErrorCode::invalid_parameter, "t must be >= 0");
  double acc = 0.0;
  for (std::size_t s = 1; s < table.alpha.size(); ++s) {
    acc += table.alpha[s] * table.alpha[s] * std::exp(-t * std::popcount(static_cast<std::uint32_t>(s)));
  }
  return acc;
}

namespace {

// Sum over (omega, omega') of 2^{-N} P_t(omega -> omega') g(f(omega), f(omega')).
template <class G>
double two_time_sum(const std::vector<double>& f, double t, G g) {
  require(t >= 0.0, ErrorCode::invalid_parameter, "t must be >= 0");
  const int cells = cells_of(f.size());
  const double keep = std::exp(-t);
  const double same = keep + 0.5 * (1.0 - keep);
  const double flip = 0.5 * (1.0 - keep);
  std::vector<double> weight(static_cast<std::size_t>(cells + 1));
  for (int d = 0; d <= cells; ++d) weight[static_cast<std::size_t>(d)] = std::pow(same, cells - d) * std::pow(flip, d);
  const std::size_t size = f.size();
  double acc = 0.0;
  for (std::uint32_t w = 0; w < size; ++w) {
    double row = 0.0;
    for (std::uint32_t w2 = 0; w2 < size; ++w2) {
      row += weight[static_cast<std::size_t>(std::popcount(w ^ w2))] * g(f[w], f[w2]);
    }
    acc += row;
  }
  return acc / static_cast<double>(size);
}

}  // namespace

double two_time_covariance_enumerated(const std::vector<double>& f, double t) {
  const double mu = f_mean(f);
  return two_time_sum(f, t, [mu](double a, double b) { return (a - mu) * (b - mu); });
}

double two_time_square_difference_enumerated(const std::vector<double>& f, double t) {
  return two_time_sum(f, t, [](double a, double b) { return (a - b) * (a - b); });
}

SpectralSampleLaw spectral_sample_law(const SpectralTable& table) {
  require(table.variance > 0.0, ErrorCode::domain_error, "zero-variance function has no spectral sample");
  SpectralSampleLaw q;
  q.cells = table.cells;
  q.q.assign(table.alpha.size(), 0.0);
  for (std::size_t s = 1; s < table.alpha.size(); ++s) q.q[s] = table.alpha[s] * table.alpha[s] / table.variance;
  return q;
}

InfluenceResult influence_sum(const std::vector<double>& f) {
  const int cells = cells_of(f.size());
  InfluenceResult r;
  r.per_cell.assign(static_cast<std::size_t>(cells), 0.0);
  const std::size_t size = f.size();
  for (int v = 0; v < cells; ++v) {
    double acc = 0.0;
    for (std::uint32_t w = 0; w < size; ++w) {
      const double d = f[w] - f[w ^ (1U << v)];
      acc += d * d;
    }
    r.per_cell[static_cast<std::size_t>(v)] = acc / static_cast<double>(size);
    r.sum += r.per_cell[static_cast<std::size_t>(v)];
  }
  const double mu = f_mean(f);
  double var = 0.0;
  for (double x : f) var += (x - mu) * (x - mu);
  var /= static_cast<double>(size);
  if (var > 0.0) r.mean_spectral_size = r.sum / (4.0 * var);
  return r;
}

double InfluenceResult::mean_size() const {
  require(mean_spectral_size.has_value(), ErrorCode::domain_error, "zero-variance function: E_Q|S| undefined");
  return *mean_spectral_size;
}

StabilityCheck stability_bound_check(const std::vector<double>& f, const SpectralTable& table, double t) {
  require(t >= 0.0, ErrorCode::invalid_parameter, "t must be >= 0");
  const auto q = spectral_sample_law(table);
  double e = 0.0;
  for (std::size_t s = 1; s < q.q.size(); ++s) e += q.q[s] * std::exp(-t * std::popcount(static_cast<std::uint32_t>(s)));
  StabilityCheck c;
  c.lhs = two_time_square_difference_enumerated(f, t);
  c.rhs = 2.0 * table.variance * (1.0 - e);
  return c;
}

}  // namespace dlpp
