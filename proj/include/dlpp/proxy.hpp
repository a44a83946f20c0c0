#pragma once

#include <vector>

#include "dlpp/lpp.hpp"
#include "dlpp/overlap.hpp"
#include "dlpp/scaling.hpp"

namespace dlpp {

struct ProxyParams {
  int ell = 1;          ///< dyadic scale of the excursions to mimic
  double eta = 0.3;     ///< interpolation spacing 2^{-m} = 2^{-ell} tau0^eta, m rounded
  double xi = 0.25;     ///< lifetimes must lie in [xi, 1 - xi]
  double tau0 = 0.1;
  double alpha = 1.0;   ///< classification parameters reported on retained excursions
  double chi = 0.5;
};

/// Interpolation exponent m = round(ell + eta log2(1/tau0)); throws unless ell <= m and 2^m <= n.
int proxy_interpolation_exponent(const ProxyParams& params, int n);

struct ProxyResult {
  LatticePath proxy;   ///< time-zero concatenation, energy under the time-zero field
  Zigzag zigzag;
  std::vector<GridPoint> interpolation;  ///< (u_i, s_i) in grid units, s_0 = 0 and s_k = n
  std::vector<ExcursionRecord> retained;
  long candidate_count = 0;  ///< |C|
  long discarded_count = 0;  ///< every excursion of rho^0 vs rho^t not retained
  int interpolation_exponent = 0;
  std::vector<double> segment_weights;  ///< time-zero weight of each polymer piece
  LatticePath rho0;
  LatticePath rhot;  ///< energy under the time-t field
};

/// Time-zero proxy of the time-t polymer on the full route (mesh fields only).
ProxyResult build_proxy(const FieldSnapshot& snap0, const FieldSnapshot& snapt, const ProxyParams& params);

struct ProxyReport {
  double weight_gap = 0.0;    ///< |Wgt^0(proxy) - Wgt^t(rho^t)|
  double baseline_gap = 0.0;  ///< |Wgt^0(rho^t) - Wgt^t(rho^t)|
  double retention_fraction = 1.0;
  double max_dist = 0.0;      ///< MaxDist(proxy, rho^t)
};

ProxyReport proxy_report(const ProxyResult& result, const FieldSnapshot& snap0, const FieldSnapshot& snapt);

/// Retain/discard scan over lifetimes [b_i, f_i] sorted by height: the first is retained; a later
/// one is discarded iff the previous one was retained and b - f_prev <= gap.
std::vector<bool> retention_scan(const std::vector<std::pair<double, double>>& lifetimes, double gap);

/// Interpolation levels: J = {floor(n k 2^{-m})}, minus consecutive pairs whose closed interval
/// contains a retained endpoint (0 and n kept), plus the endpoints themselves; sorted, unique.
std::vector<int> interpolation_levels(int n, int m_exp, const std::vector<int>& endpoint_levels);

}  // namespace dlpp
