#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlpp/error.hpp"
#include "dlpp/harness.hpp"
#include "dlpp/io.hpp"
#include "dlpp/lpp.hpp"
#include "dlpp/noise.hpp"
#include "dlpp/overlap.hpp"
#include "dlpp/proxy.hpp"
#include "dlpp/spectral.hpp"

#ifndef DLPP_VERSION
#define DLPP_VERSION "unknown"
#endif

using json = nlohmann::ordered_json;
using namespace dlpp;

namespace {

const std::vector<std::string> kSubcommands = {"simulate",         "spectral",  "variance-check", "overlap-monotone",
                                               "stability-check",  "transition-sweep", "exponents", "twin-peaks",
                                               "refine-check",     "proxy-demo", "excursion-check"};

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorCode::config_error, what); }

json defaults() {
  std::uint64_t seed = 1;
  if (const char* env = std::getenv("DLPP_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    seed = std::strtoull(env, &end, 10);
    if (*end != '\0') config_fail(std::string("DLPP_SEED is not an unsigned integer: ") + env);
  }
  return json{
      {"model", "bernoulli"},
      {"n", json::array({16})},
      {"m", nullptr},
      {"p", nullptr},
      {"t", json::array({0.1})},
      {"tau", "0.05:10:log16"},
      {"samples", 1000},
      {"seed", seed},
      {"threads", default_threads()},
      {"out", "dlpp-out"},
      {"lattice", "3x3"},
      {"t_max", 20.0},
      {"grid_points", 40},
      {"m_list", json::array({2, 4, 8, 16})},
      {"exponents", {{"bootstrap", 1000}, {"fit_last", 4}, {"transversal_band", {0.60, 0.74}}, {"weight_band", {0.27, 0.40}}}},
      {"proxy",
       {{"ell", 1}, {"eta", 0.3}, {"xi", 0.25}, {"tau0", 0.1}, {"alpha", 1.0}, {"chi", 0.5}, {"min_fraction", 0.9}}},
      {"twin_peaks",
       {{"a", 0.5},
        {"sigmas", {0.05, 0.1, 0.2, 0.4, 0.8}},
        {"window", {1.0, 2.0}},
        {"annulus", {0.0, 0.0}},
        {"beta1", 0.1},
        {"beta", 0.1},
        {"slope_band", {0.7, 1.3}}}},
      {"stability", {{"mode", "fixed"}, {"x", 0.0}, {"i", 0}, {"y", nullptr}, {"j", nullptr}, {"grid_points", 5}}},
  };
}

// Objects merge key by key; anything else replaces.
void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) {
    if (it->is_object() && into.contains(it.key()) && into[it.key()].is_object()) {
      merge(into[it.key()], *it);
    } else {
      into[it.key()] = *it;
    }
  }
}

double to_double(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    config_fail(key + ": not a number: " + s);
  }
  if (used != s.size()) config_fail(key + ": not a number: " + s);
  return v;
}

double num(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(v.get<std::string>(), key);
  config_fail(key + ": expected a number");
}

long integer(const json& v, const std::string& key) {
  const double d = num(v, key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) config_fail(key + ": expected an integer");
  return static_cast<long>(d);
}

std::optional<double> opt_num(const json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  return num(v, key);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

/// "a:b:K" (K linear points), "a:b:logK" (K log-spaced points) or "v1,v2,...".
std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double a = to_double(parts[0], key), b = to_double(parts[1], key);
    const bool log = parts[2].rfind("log", 0) == 0;
    const double kd = to_double(log ? parts[2].substr(3) : parts[2], key);
    if (kd < 2 || kd != std::floor(kd) || !(b > a)) config_fail(key + ": bad range " + text);
    if (log && !(a > 0.0)) config_fail(key + ": log range needs a positive start");
    const int k = static_cast<int>(kd);
    std::vector<double> out;
    for (int i = 0; i < k; ++i) {
      const double u = static_cast<double>(i) / (k - 1);
      out.push_back(log ? std::exp(std::log(a) + u * (std::log(b) - std::log(a))) : a + u * (b - a));
    }
    out.front() = a;
    out.back() = b;
    return out;
  }
  if (parts.size() != 1) config_fail(key + ": bad grid " + text);
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, key));
  if (out.empty()) config_fail(key + ": empty list");
  return out;
}

std::vector<double> num_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_grid(v.get<std::string>(), key);
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(num(e, key));
    return out;
  }
  config_fail(key + ": expected a number, list or grid string");
}

std::vector<int> int_list(const json& v, const std::string& key) {
  std::vector<int> out;
  for (double d : num_list(v, key)) {
    if (d != std::floor(d) || std::abs(d) > 1e9) config_fail(key + ": expected integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

std::pair<double, double> pair_of(const json& v, const std::string& key) {
  const auto xs = num_list(v, key);
  if (xs.size() != 2) config_fail(key + ": expected two values");
  return {xs[0], xs[1]};
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const std::uint64_t seed = std::strtoull(s.c_str(), &end, 10);
    if (!s.empty() && *end == '\0' && s.front() != '-') return seed;
  }
  config_fail("seed: expected an unsigned integer");
}

/// Typed view of the merged configuration; parsing failures are config errors.
struct RunConfig {
  std::string subcommand;
  FieldKind kind = FieldKind::bernoulli;
  std::vector<int> n;
  std::optional<int> m;
  std::optional<double> p;
  std::vector<double> t;
  std::vector<double> tau;
  RunOptions opt;
  std::string out;
  int lattice = 3;
  double t_max = 20.0;
  int grid_points = 40;
  std::vector<int> m_list;
  int bootstrap = 1000;
  int fit_last = 4;
  std::pair<double, double> transversal_band, weight_band, slope_band;
  ProxyParams proxy;
  double min_fraction = 0.9;
  TwinPeaksParams twin;
  std::string stability_mode;
  StabilityEndpoints ends;
  bool ends_y_set = false, ends_j_set = false;
  int stability_grid_points = 5;

  int first_n() const { return n.front(); }
  int mesh_m() const { return m.value_or(4); }
  double first_t() const { return t.front(); }
};

RunConfig parse_config(const std::string& sub, const json& c) {
  RunConfig r;
  r.subcommand = sub;
  try {
    r.kind = parse_field_kind(c.at("model").get<std::string>());
  } catch (const Error& e) {
    config_fail(e.what());
  }
  r.n = int_list(c.at("n"), "n");
  if (!c.at("m").is_null()) r.m = static_cast<int>(integer(c.at("m"), "m"));
  r.p = opt_num(c.at("p"), "p");
  r.t = num_list(c.at("t"), "t");
  r.tau = num_list(c.at("tau"), "tau");
  r.opt.samples = integer(c.at("samples"), "samples");
  r.opt.seed = parse_seed(c.at("seed"));
  r.opt.threads = static_cast<int>(integer(c.at("threads"), "threads"));
  if (r.opt.threads < 1) config_fail("threads must be >= 1");
  r.out = c.at("out").get<std::string>();
  const auto dims = split(c.at("lattice").get<std::string>(), 'x');
  if (dims.size() != 2 || dims[0] != dims[1]) config_fail("lattice must look like NxN");
  r.lattice = static_cast<int>(to_double(dims[0], "lattice"));
  r.t_max = num(c.at("t_max"), "t_max");
  r.grid_points = static_cast<int>(integer(c.at("grid_points"), "grid_points"));
  r.m_list = int_list(c.at("m_list"), "m_list");
  const auto& ex = c.at("exponents");
  r.bootstrap = static_cast<int>(integer(ex.at("bootstrap"), "exponents.bootstrap"));
  r.fit_last = static_cast<int>(integer(ex.at("fit_last"), "exponents.fit_last"));
  r.transversal_band = pair_of(ex.at("transversal_band"), "exponents.transversal_band");
  r.weight_band = pair_of(ex.at("weight_band"), "exponents.weight_band");
  const auto& px = c.at("proxy");
  r.proxy.ell = static_cast<int>(integer(px.at("ell"), "proxy.ell"));
  r.proxy.eta = num(px.at("eta"), "proxy.eta");
  r.proxy.xi = num(px.at("xi"), "proxy.xi");
  r.proxy.tau0 = num(px.at("tau0"), "proxy.tau0");
  r.proxy.alpha = num(px.at("alpha"), "proxy.alpha");
  r.proxy.chi = num(px.at("chi"), "proxy.chi");
  r.min_fraction = num(px.at("min_fraction"), "proxy.min_fraction");
  const auto& tp = c.at("twin_peaks");
  r.twin.a = num(tp.at("a"), "twin_peaks.a");
  r.twin.sigmas = num_list(tp.at("sigmas"), "twin_peaks.sigmas");
  std::tie(r.twin.window_lo, r.twin.window_hi) = pair_of(tp.at("window"), "twin_peaks.window");
  std::tie(r.twin.annulus_lo, r.twin.annulus_hi) = pair_of(tp.at("annulus"), "twin_peaks.annulus");
  r.twin.beta1 = num(tp.at("beta1"), "twin_peaks.beta1");
  r.twin.beta = num(tp.at("beta"), "twin_peaks.beta");
  r.slope_band = pair_of(tp.at("slope_band"), "twin_peaks.slope_band");
  const auto& st = c.at("stability");
  r.stability_mode = st.at("mode").get<std::string>();
  if (r.stability_mode != "fixed" && r.stability_mode != "grid") config_fail("stability.mode must be fixed or grid");
  r.ends.x = num(st.at("x"), "stability.x");
  r.ends.i = static_cast<int>(integer(st.at("i"), "stability.i"));
  r.ends_y_set = !st.at("y").is_null();
  r.ends_j_set = !st.at("j").is_null();
  if (r.ends_y_set) r.ends.y = num(st.at("y"), "stability.y");
  if (r.ends_j_set) r.ends.j = static_cast<int>(integer(st.at("j"), "stability.j"));
  r.stability_grid_points = static_cast<int>(integer(st.at("grid_points"), "stability.grid_points"));
  return r;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Outcome {
  std::vector<CheckReport> checks;
  std::vector<ResultRow> rows;
  std::vector<PlotSeries> plot;
  PlotSpec spec;
};

ResultRow row_of(const std::string& model, int n, int m, const std::string& param, double t, double tau,
                 const Estimate& e, std::uint64_t seed) {
  return ResultRow{model, n, m, param, t, tau, e.mean, e.sem, e.n_samples, seed};
}

/// One series per (param, n) using the chosen x column.
std::vector<PlotSeries> series_from_rows(const std::vector<ResultRow>& rows, const std::string& param, bool use_tau) {
  std::map<int, PlotSeries> by_n;
  for (const auto& r : rows) {
    if (r.param != param) continue;
    auto& s = by_n[r.n];
    s.label = param + " n=" + std::to_string(r.n);
    s.x.push_back(use_tau ? r.tau : r.t);
    s.y.push_back(r.estimate);
  }
  std::vector<PlotSeries> out;
  for (auto& [n, s] : by_n) out.push_back(std::move(s));
  return out;
}

CheckReport band_check(const std::string& name, double value, std::pair<double, double> band) {
  CheckReport r;
  r.name = name;
  r.lhs = Estimate{value, 0.0, 0, 0};
  r.tolerance_policy = "value in [" + format_double(band.first) + ", " + format_double(band.second) + "]";
  r.verdict = value >= band.first && value <= band.second ? Verdict::pass : Verdict::fail;
  r.details = {{"band_lo", band.first}, {"band_hi", band.second}};
  return r;
}

Outcome run_simulate(const RunConfig& c) {
  Outcome o;
  std::vector<double> ts = c.t;
  std::sort(ts.begin(), ts.end());
  for (int n : c.n) {
    const std::uint64_t seed_n = mix64(c.opt.seed ^ (static_cast<std::uint64_t>(n) * 0x9e3779b97f4a7c15ULL));
    auto samples = parallel_samples<std::vector<double>>(c.opt.samples, c.opt.threads, [&](long s) {
      DynEnv env = make_env(c.kind, n, c.m, c.p, seed_n, static_cast<std::uint64_t>(s));
      const LatticePath g0 = full_route_geodesic(env.advance(0.0));
      std::vector<double> res{g0.energy};
      for (double t : ts) {
        const LatticePath gt = full_route_geodesic(env.advance(t));
        res.push_back(gt.energy);
        res.push_back(overlap_measure(g0, gt).scaled);
      }
      return res;
    });
    auto column = [&](std::size_t k) {
      std::vector<double> col;
      for (const auto& s : samples) col.push_back(s[k]);
      return estimate_of(col, c.opt.seed);
    };
    const std::string model = to_string(c.kind);
    const int mm = is_lattice(c.kind) ? 1 : c.m.value_or(1);
    const double scale = std::cbrt(static_cast<double>(n));
    o.rows.push_back(row_of(model, n, mm, "energy", 0.0, 0.0, column(0), c.opt.seed));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      o.rows.push_back(row_of(model, n, mm, "energy", ts[k], ts[k] * scale, column(1 + 2 * k), c.opt.seed));
      o.rows.push_back(row_of(model, n, mm, "scaled_overlap", ts[k], ts[k] * scale, column(2 + 2 * k), c.opt.seed));
    }
  }
  o.plot = series_from_rows(o.rows, "scaled_overlap", false);
  o.spec = PlotSpec{"geodesic overlap", "t", "scaled overlap", false, false};
  return o;
}

Outcome run_spectral(const RunConfig& c) {
  const int n = c.lattice - 1;
  if (n < 1) config_fail("lattice must be at least 2x2");
  const auto f = lpp_function_table(n);
  const auto table = fourier_walsh(f);
  const int cells = table.cells;
  const double tol = 1e-9;
  Outcome o;
  auto exact = [&](const std::string& name, double lhs, double rhs) {
    CheckReport r;
    r.name = name;
    r.lhs = Estimate{lhs, 0.0, 0, 0};
    r.rhs = Estimate{rhs, 0.0, 0, 0};
    r.tolerance_policy = "|lhs - rhs| < 1e-9";
    r.verdict = std::abs(lhs - rhs) < tol ? Verdict::pass : Verdict::fail;
    r.details = {{"gap", std::abs(lhs - rhs)}};
    o.checks.push_back(r);
  };
  double ef2 = 0.0, parseval = 0.0;
  for (double x : f) ef2 += x * x;
  ef2 /= static_cast<double>(f.size());
  for (double a : table.alpha) parseval += a * a;
  exact("parseval", parseval, ef2);
  const auto back = reconstruct(table);
  double worst = 0.0;
  for (std::size_t w = 0; w < f.size(); ++w) worst = std::max(worst, std::abs(back[w] - f[w]));
  exact("reconstruction", worst, 0.0);
  const auto law = spectral_sample_law(table);
  exact("influence_identity", influence_sum(f).mean_size(), law.mean_size());
  const std::string model = "bernoulli";
  for (double t : c.t) {
    const double cov = two_time_covariance(table, t);
    o.rows.push_back(row_of(model, n, 1, "two_time_covariance", t, 0.0, Estimate{cov, 0.0, 0, 0}, c.opt.seed));
    std::ostringstream name;
    name << "covariance_t=" << t;
    // Direct enumeration is quadratic in 2^cells; skipped beyond 12 cells.
    if (cells <= 12) exact(name.str(), cov, two_time_covariance_enumerated(f, t));
  }
  for (int k = 1; k <= cells; ++k) {
    double mass = 0.0;
    for (std::size_t s = 1; s < law.q.size(); ++s) {
      if (__builtin_popcountll(s) == k) mass += law.q[s];
    }
    o.rows.push_back(row_of(model, n, 1, "spectral_mass", 0.0, static_cast<double>(k), Estimate{mass, 0.0, 0, 0},
                            c.opt.seed));
  }
  o.plot = series_from_rows(o.rows, "spectral_mass", true);
  o.spec = PlotSpec{"spectral sample size law", "|S|", "mass", false, false};
  return o;
}

Outcome single(CheckReport r, const std::string& param, bool use_tau, PlotSpec spec) {
  Outcome o;
  o.rows = r.rows;
  o.plot = series_from_rows(o.rows, param, use_tau);
  o.spec = std::move(spec);
  o.checks.push_back(std::move(r));
  return o;
}

Outcome run_variance(const RunConfig& c) {
  if (c.grid_points < 1) config_fail("grid_points must be >= 1");
  return single(check_dynamical_variance(c.kind, c.first_n(), c.m, quadratic_grid(c.t_max, c.grid_points), c.t_max, c.opt),
                "mean_overlap", false, PlotSpec{"mean overlap", "t", "E overlap", false, false});
}

Outcome run_monotone(const RunConfig& c) {
  Outcome o;
  for (int n : c.n) {
    auto r = check_mean_overlap_monotone(c.kind, n, c.m, c.p, c.t, c.opt);
    o.rows.insert(o.rows.end(), r.rows.begin(), r.rows.end());
    o.checks.push_back(std::move(r));
  }
  o.plot = series_from_rows(o.rows, "mean_overlap", false);
  o.spec = PlotSpec{"mean overlap", "t", "E overlap", false, false};
  return o;
}

Outcome run_stability(const RunConfig& c) {
  const int n = c.first_n();
  const int m = c.m.value_or(n);
  if (c.stability_mode == "grid") {
    return single(check_weight_stability_grid(n, m, c.stability_grid_points, c.first_t(), c.opt), "sup_scaled_delta",
                  false, PlotSpec{"weight stability", "t", "sup", false, false});
  }
  StabilityEndpoints e = c.ends;
  if (!c.ends_y_set) e.y = n;
  if (!c.ends_j_set) e.j = n;
  return single(check_weight_stability_fixed(n, m, e, c.t, c.opt), "mean_sq_weight_change", false,
                PlotSpec{"weight stability", "t", "E|M^t - M^0|^2", false, false});
}

Outcome run_sweep(const RunConfig& c) {
  Outcome o;
  const auto pts = transition_sweep(c.kind, c.n, c.tau, c.m, c.p, c.opt);
  const int mm = is_lattice(c.kind) ? 1 : c.m.value_or(1);
  for (const auto& pt : pts) {
    const double t = pt.tau / std::cbrt(static_cast<double>(pt.n));
    o.rows.push_back(row_of(to_string(c.kind), pt.n, mm, "scaled_overlap", t, pt.tau, pt.overlap, c.opt.seed));
  }
  o.plot = series_from_rows(o.rows, "scaled_overlap", true);
  o.spec = PlotSpec{"overlap transition", "tau = t n^{1/3}", "scaled overlap", true, false};
  return o;
}

Outcome run_exponents(const RunConfig& c) {
  Outcome o;
  const auto fit = exponent_fit(c.kind, c.n, c.m, c.p, c.opt, c.bootstrap, c.fit_last);
  const std::string model = to_string(c.kind);
  const int mm = is_lattice(c.kind) ? 1 : c.m.value_or(1);
  for (std::size_t k = 0; k < fit.n_list.size(); ++k) {
    const int n = fit.n_list[k];
    o.rows.push_back(row_of(model, n, mm, "max_fluc", 0.0, 0.0, fit.max_fluc[k], c.opt.seed));
    o.rows.push_back(
        row_of(model, n, mm, "weight_sd", 0.0, 0.0, Estimate{fit.weight_sd[k], 0.0, c.opt.samples, c.opt.seed}, c.opt.seed));
  }
  auto slope_row = [&](const std::string& name, const SlopeFit& s) {
    o.rows.push_back(row_of(model, 0, mm, name, 0.0, 0.0, Estimate{s.slope, (s.hi - s.lo) / (2 * 1.96), c.opt.samples, c.opt.seed},
                            c.opt.seed));
    auto r = band_check(name, s.slope, name == "chi_transversal" ? c.transversal_band : c.weight_band);
    r.details.emplace_back("bootstrap_lo", s.lo);
    r.details.emplace_back("bootstrap_hi", s.hi);
    o.checks.push_back(std::move(r));
  };
  slope_row("chi_transversal", fit.chi_transversal);
  slope_row("chi_weight", fit.chi_weight);
  for (const std::string param : {"max_fluc", "weight_sd"}) {
    PlotSeries s{param, {}, {}};
    for (const auto& r : o.rows) {
      if (r.param == param) {
        s.x.push_back(r.n);
        s.y.push_back(r.estimate);
      }
    }
    o.plot.push_back(std::move(s));
  }
  o.spec = PlotSpec{"fluctuation exponents", "n", "value", true, true};
  return o;
}

Outcome run_twin_peaks(const RunConfig& c) {
  Outcome o;
  const int n = c.first_n();
  const int m = c.m.value_or(8);
  const auto res = twin_peaks_and_deficit(n, m, c.twin, c.opt);
  for (std::size_t k = 0; k < res.probability.size(); ++k) {
    o.rows.push_back(row_of("brownian-mesh", n, m, "twin_peaks_probability", 0.0, c.twin.sigmas[k], res.probability[k],
                            c.opt.seed));
  }
  o.rows.push_back(row_of("brownian-mesh", n, m, "level_deficit", 0.0, 0.0, res.deficit, c.opt.seed));
  auto r = band_check("twin_peaks_slope", res.slope, c.slope_band);
  r.details.emplace_back("monotone", res.monotone ? 1.0 : 0.0);
  if (!res.monotone) r.verdict = Verdict::fail;
  o.checks.push_back(std::move(r));
  o.plot = series_from_rows(o.rows, "twin_peaks_probability", true);
  o.spec = PlotSpec{"twin peaks", "sigma", "probability", true, true};
  return o;
}

Outcome run_refine(const RunConfig& c) {
  return single(refinement_check(c.first_n(), c.m_list, c.opt), "", false, PlotSpec{});
}

Outcome run_proxy(const RunConfig& c) {
  return single(proxy_check(c.first_n(), c.mesh_m(), c.first_t(), c.proxy, c.min_fraction, c.opt), "", false, PlotSpec{});
}

Outcome run_excursion(const RunConfig& c) {
  return single(excursion_additivity_check(c.first_n(), c.mesh_m(), c.first_t(), c.opt), "", false, PlotSpec{});
}

Outcome dispatch(const RunConfig& c) {
  const std::string& s = c.subcommand;
  if (s == "simulate") return run_simulate(c);
  if (s == "spectral") return run_spectral(c);
  if (s == "variance-check") return run_variance(c);
  if (s == "overlap-monotone") return run_monotone(c);
  if (s == "stability-check") return run_stability(c);
  if (s == "transition-sweep") return run_sweep(c);
  if (s == "exponents") return run_exponents(c);
  if (s == "twin-peaks") return run_twin_peaks(c);
  if (s == "refine-check") return run_refine(c);
  if (s == "proxy-demo") return run_proxy(c);
  return run_excursion(c);
}

json estimate_json(const Estimate& e) {
  return json{{"mean", e.mean}, {"sem", e.sem}, {"samples", e.n_samples}, {"seed_root", e.seed_root}};
}

json check_json(const CheckReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = std::isfinite(v) ? json(v) : json(format_double(v));
  return json{{"name", r.name},
              {"verdict", to_string(r.verdict)},
              {"lhs", estimate_json(r.lhs)},
              {"rhs", estimate_json(r.rhs)},
              {"tolerance_policy", r.tolerance_policy},
              {"details", details}};
}

int execute(const std::string& sub, const json& config) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = parse_config(sub, config);
  Outcome o = dispatch(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int code = 0;
  json checks = json::array();
  for (const auto& r : o.checks) {
    checks.push_back(check_json(r));
    if (r.verdict == Verdict::fail) code = 1;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) config_fail("cannot create output directory " + cfg.out + ": " + ec.message());
  const std::filesystem::path dir(cfg.out);
  write_text_file((dir / "results.csv").string(), to_csv(o.rows));
  json report{{"subcommand", sub},
              {"version", DLPP_VERSION},
              {"config", config},
              {"wall_time_seconds", wall},
              {"checks", checks},
              {"exit_code", code}};
  write_text_file((dir / "report.json").string(), report.dump(2) + "\n");
  bool plotted = false;
  for (const auto& s : o.plot) plotted = plotted || s.x.size() >= 2;
  if (plotted) {
    o.spec.title = sub + ": " + o.spec.title;
    write_text_file((dir / "plot.svg").string(), render_svg(o.plot, o.spec));
  }
  for (const auto& r : o.checks) std::cout << r.name << ": " << to_string(r.verdict) << "\n";
  std::cout << "wrote " << o.rows.size() << " rows to " << (dir / "results.csv").string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical last passage percolation experiments"};
  app.set_version_flag("--version", std::string(DLPP_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; command-line flags take precedence");

  // flag name -> JSON pointer into the config
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"model", "/model"},       {"n", "/n"},
      {"m", "/m"},               {"p", "/p"},
      {"t", "/t"},               {"tau", "/tau"},
      {"samples", "/samples"},   {"seed", "/seed"},
      {"threads", "/threads"},   {"out", "/out"},
      {"lattice", "/lattice"},   {"t-max", "/t_max"},
      {"grid-points", "/grid_points"}, {"m-list", "/m_list"},
      {"bootstrap", "/exponents/bootstrap"}, {"fit-last", "/exponents/fit_last"},
      {"ell", "/proxy/ell"},     {"eta", "/proxy/eta"},
      {"xi", "/proxy/xi"},       {"tau0", "/proxy/tau0"},
      {"alpha", "/proxy/alpha"}, {"chi", "/proxy/chi"},
      {"min-fraction", "/proxy/min_fraction"}, {"a", "/twin_peaks/a"},
      {"sigmas", "/twin_peaks/sigmas"}, {"window", "/twin_peaks/window"},
      {"annulus", "/twin_peaks/annulus"}, {"beta1", "/twin_peaks/beta1"},
      {"beta", "/twin_peaks/beta"}, {"mode", "/stability/mode"},
      {"x", "/stability/x"},     {"i", "/stability/i"},
      {"y", "/stability/y"},     {"j", "/stability/j"},
      {"stability-grid-points", "/stability/grid_points"},
  };
  std::vector<std::string> values(flags.size());
  std::vector<CLI::Option*> options;
  for (std::size_t k = 0; k < flags.size(); ++k) options.push_back(app.add_option("--" + flags[k].first, values[k]));
  for (const auto& name : kSubcommands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    json config = defaults();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) config_fail("cannot read config file " + config_path);
      json file;
      try {
        file = json::parse(in);
      } catch (const json::exception& e) {
        config_fail(std::string("config parse error: ") + e.what());
      }
      if (!file.is_object()) config_fail("config file must hold a JSON object");
      for (auto it = file.begin(); it != file.end(); ++it) {
        if (!config.contains(it.key())) config_fail("unknown config key: " + it.key());
      }
      merge(config, file);
    }
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (options[k]->count() > 0) config[json::json_pointer(flags[k].second)] = values[k];
    }
    return execute(sub, config);
  } catch (const Error& e) {
    std::cerr << "dlpp: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "dlpp: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dlpp: " << e.what() << "\n";
    return 2;
  }
}
