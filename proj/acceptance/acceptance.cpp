// One PASS/FAIL line per acceptance criterion; exit status 0 iff every criterion passes.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dlpp/harness.hpp"
#include "dlpp/io.hpp"
#include "dlpp/lpp.hpp"
#include "dlpp/noise.hpp"
#include "dlpp/overlap.hpp"
#include "dlpp/spectral.hpp"
#include "oracles.hpp"

using namespace dlpp;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<ResultRow> rows;
};

ResultRow row(const std::string& model, int n, int m, const std::string& param, double t, double tau, double value,
              double sem = 0.0, long samples = 0) {
  return ResultRow{model, n, m, param, t, tau, value, sem, samples, kSeed};
}

ResultRow row(const std::string& model, int n, int m, const std::string& param, double t, double tau,
              const Estimate& e) {
  return ResultRow{model, n, m, param, t, tau, e.mean, e.sem, e.n_samples, e.seed_root};
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunOptions opts(long samples, int threads) { return RunOptions{samples, kSeed, threads}; }

// ---------------------------------------------------------------------------

Outcome oracle_equivalence(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const CounterRng rng(kSeed, 1, Tag::test);
  const FieldKind lattice_kinds[] = {FieldKind::bernoulli, FieldKind::uniform, FieldKind::gaussian};
  long mismatches = 0;
  double worst_real = 0.0;
  std::uint64_t draw = 0;
  auto pick = [&](int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng.uniform(draw++, 0) * (hi - lo + 1));
  };
  auto compare = [&](double got, double want, bool integer) {
    if (integer) {
      mismatches += got != want;
    } else {
      const double err = std::abs(got - want);
      worst_real = std::max(worst_real, err);
      mismatches += err > 1e-12;
    }
  };
  for (int k = 0; k < 1000; ++k) {
    const FieldKind kind = lattice_kinds[k % 3];
    const int n = pick(1, 4);
    const FieldSnapshot snap = make_env(kind, n, std::nullopt, std::nullopt, kSeed, 1000 + k).snapshot(0.0);
    GridPoint src{pick(0, n), pick(0, n)};
    GridPoint dst{pick(src.x, n), pick(src.level, n)};
    if (k % 4 == 0) src = {0, 0}, dst = {n, n};
    const LatticePath p = max_energy_upright(snap, src, dst);
    compare(p.energy, brute_force_energy(snap, src, dst), kind == FieldKind::bernoulli);
    compare(path_energy(snap, p), p.energy, kind == FieldKind::bernoulli);
  }
  for (int k = 0; k < 1000; ++k) {
    const int n = pick(1, 3), m = pick(1, 3);
    const FieldSnapshot snap = make_env(FieldKind::brownian_mesh, n, m, std::nullopt, kSeed, 5000 + k).snapshot(0.0);
    GridPoint src{pick(0, n * m), pick(0, n)};
    GridPoint dst{pick(src.x, n * m), pick(src.level, n)};
    if (k % 4 == 0) src = {0, 0}, dst = {n * m, n};
    const LatticePath p = max_energy_mesh(snap, src, dst);
    compare(p.energy, brute_force_energy(snap, src, dst), false);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = mismatches == 0 && secs < 30.0;
  o.summary = "2000 instances, mismatches=" + std::to_string(mismatches) + ", worst real error=" + fmt(worst_real) +
              ", runtime=" + fmt(secs, 3) + "s (< 30s)";
  o.rows.push_back(row("mixed", 4, 3, "oracle_mismatches", 0, 0, static_cast<double>(mismatches), 0, 2000));
  o.rows.push_back(row("mixed", 4, 3, "oracle_worst_real_error", 0, 0, worst_real, 0, 2000));
  return o;
}

Outcome spectral_suite(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = lpp_function_table(2);
  const auto table = fourier_walsh(f);
  double ef2 = 0.0, parseval = 0.0, recon = 0.0;
  for (double x : f) ef2 += x * x;
  ef2 /= static_cast<double>(f.size());
  for (double a : table.alpha) parseval += a * a;
  const auto back = reconstruct(table);
  for (std::size_t w = 0; w < f.size(); ++w) recon = std::max(recon, std::abs(back[w] - f[w]));
  const double infl = std::abs(influence_sum(f).mean_size() - spectral_sample_law(table).mean_size());
  double cov = 0.0;
  Outcome o;
  for (double t : {0.2, 1.0}) {
    const double gap = std::abs(two_time_covariance(table, t) - two_time_covariance_enumerated(f, t));
    cov = std::max(cov, gap);
    o.rows.push_back(row("bernoulli", 2, 1, "covariance_gap", t, 0, gap));
  }
  const double secs = seconds_since(t0);
  const double worst = std::max({std::abs(parseval - ef2), recon, infl, cov});
  o.pass = worst < 1e-9 && secs < 60.0;
  o.summary = "parseval=" + fmt(std::abs(parseval - ef2)) + " reconstruction=" + fmt(recon) + " influence=" +
              fmt(infl) + " covariance=" + fmt(cov) + " (all < 1e-9), runtime=" + fmt(secs, 3) + "s (< 60s)";
  o.rows.push_back(row("bernoulli", 2, 1, "parseval_gap", 0, 0, std::abs(parseval - ef2)));
  o.rows.push_back(row("bernoulli", 2, 1, "reconstruction_gap", 0, 0, recon));
  o.rows.push_back(row("bernoulli", 2, 1, "influence_gap", 0, 0, infl));
  return o;
}

Outcome covariance_mc(int threads) {
  const auto r = check_two_time_covariance_mc(2, 0.5, opts(100000, threads));
  Outcome o;
  o.pass = r.verdict == Verdict::pass;
  o.summary = "t=0.5: MC=" + fmt(r.lhs.mean, 6) + " exact=" + fmt(r.rhs.mean, 6) + " z=" + fmt(r.detail("z_score"), 3) +
              " (|z| <= 4)";
  o.rows = r.rows;
  return o;
}

Outcome dynamical_variance(int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = check_dynamical_variance(FieldKind::gaussian, 4, std::nullopt, quadratic_grid(20.0, 40), 20.0,
                                          RunOptions{200000, 7, threads});
  const double secs = seconds_since(t0);
  Outcome o;
  const double rel = r.detail("relative_gap");
  o.pass = rel <= 0.05 && secs < 300.0;
  o.summary = "Var=" + fmt(r.lhs.mean, 6) + " integral=" + fmt(r.rhs.mean, 6) + " tail<=" + fmt(r.detail("tail_bound"), 3) +
              " relative gap=" + fmt(rel, 3) + " (<= 0.05), runtime=" + fmt(secs, 3) + "s (< 300s)";
  o.rows = r.rows;
  return o;
}

Outcome overlap_monotone(int threads) {
  const std::vector<double> grid{0, 0.05, 0.1, 0.2, 0.5, 1, 2};
  const auto b = check_mean_overlap_monotone(FieldKind::bernoulli, 50, std::nullopt, 0.5, grid, opts(10000, threads));
  const auto g = check_mean_overlap_monotone(FieldKind::gaussian, 20, std::nullopt, std::nullopt, grid, opts(10000, threads));
  Outcome o;
  o.pass = b.verdict == Verdict::pass && g.verdict == Verdict::pass;
  o.summary = "bernoulli n=50 " + to_string(b.verdict) + " (worst rise " + fmt(b.detail("worst_rise_in_sem"), 3) +
              " sem), gaussian n=20 " + to_string(g.verdict) + " (worst rise " + fmt(g.detail("worst_rise_in_sem"), 3) +
              " sem), limit 3 sem";
  o.rows = b.rows;
  o.rows.insert(o.rows.end(), g.rows.begin(), g.rows.end());
  return o;
}

Outcome weight_stability(int threads) {
  const auto r = check_weight_stability_fixed(8, 8, {0.0, 0, 8.0, 8}, {0.05, 0.1, 0.2}, opts(10000, threads));
  Outcome o;
  o.pass = r.verdict == Verdict::pass;
  std::string s;
  for (const auto& rr : r.rows) s += " t=" + fmt(rr.t, 2) + ":" + fmt(rr.estimate, 4) + "<=" + fmt(16 * rr.t + 3 * rr.sem, 4);
  o.summary = "E|M^t-M^0|^2 vs 16t+3sem:" + s;
  o.rows = r.rows;
  return o;
}

Outcome refinement(int threads) {
  const auto r = refinement_check(4, {2, 4, 8, 16}, opts(100, threads));
  Outcome o;
  o.pass = r.verdict == Verdict::pass && r.detail("monotone_failures") == 0.0 && r.detail("oscillation_failures") == 0.0;
  o.summary = "100 coupled instances, monotone failures=" + fmt(r.detail("monotone_failures")) +
              ", oscillation failures=" + fmt(r.detail("oscillation_failures"));
  o.rows = r.rows;
  o.rows.push_back(row("brownian-mesh", 4, 16, "monotone_failures", 0, 0, r.detail("monotone_failures"), 0, 100));
  o.rows.push_back(row("brownian-mesh", 4, 16, "oscillation_failures", 0, 0, r.detail("oscillation_failures"), 0, 100));
  return o;
}

Outcome transition(int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> taus;
  for (int k = 0; k < 16; ++k) taus.push_back(std::exp(std::log(0.05) + k / 15.0 * (std::log(10.0) - std::log(0.05))));
  taus.front() = 0.05;
  taus.back() = 10.0;
  taus.push_back(0.1);
  std::sort(taus.begin(), taus.end());
  const std::vector<int> ns{200, 500, 1000};
  const auto pts = transition_sweep(FieldKind::bernoulli, ns, taus, std::nullopt, 0.5, opts(3000, threads));
  const double secs = seconds_since(t0);
  auto at = [&](int n, double tau) {
    for (const auto& p : pts) {
      if (p.n == n && p.tau == tau) return p.overlap.mean;
    }
    return std::nan("");
  };
  Outcome o;
  double worst_ratio = INFINITY, worst_spread = 0.0;
  for (int n : ns) worst_ratio = std::min(worst_ratio, at(n, 0.1) / at(n, 10.0));
  for (double tau : taus) {
    double lo = INFINITY, hi = -INFINITY;
    for (int n : ns) lo = std::min(lo, at(n, tau)), hi = std::max(hi, at(n, tau));
    worst_spread = std::max(worst_spread, hi - lo);
  }
  o.pass = worst_ratio >= 2.0 && worst_spread <= 0.15 && secs < 1800.0;
  o.summary = "min O(0.1)/O(10)=" + fmt(worst_ratio, 3) + " (>= 2), max spread across n=" + fmt(worst_spread, 3) +
              " (<= 0.15), runtime=" + fmt(secs, 4) + "s (< 1800s)";
  for (const auto& p : pts) {
    o.rows.push_back(row("bernoulli", p.n, 1, "scaled_overlap", p.tau / std::cbrt(static_cast<double>(p.n)), p.tau, p.overlap));
  }
  return o;
}

Outcome exponents(int threads) {
  const auto fit = exponent_fit(FieldKind::bernoulli, {128, 256, 512, 1024, 2048}, std::nullopt, 0.5, opts(2000, threads), 1000, 5);
  Outcome o;
  const double a = fit.chi_transversal.slope, b = fit.chi_weight.slope;
  o.pass = a >= 0.60 && a <= 0.74 && b >= 0.27 && b <= 0.40;
  o.summary = "transversal=" + fmt(a, 3) + " [" + fmt(fit.chi_transversal.lo, 3) + "," + fmt(fit.chi_transversal.hi, 3) +
              "] (in [0.60,0.74]), weight=" + fmt(b, 3) + " [" + fmt(fit.chi_weight.lo, 3) + "," +
              fmt(fit.chi_weight.hi, 3) + "] (in [0.27,0.40])";
  for (std::size_t k = 0; k < fit.n_list.size(); ++k) {
    o.rows.push_back(row("bernoulli", fit.n_list[k], 1, "max_fluc", 0, 0, fit.max_fluc[k]));
    o.rows.push_back(row("bernoulli", fit.n_list[k], 1, "weight_sd", 0, 0, fit.weight_sd[k], 0, 2000));
  }
  o.rows.push_back(row("bernoulli", 0, 1, "chi_transversal", 0, 0, a));
  o.rows.push_back(row("bernoulli", 0, 1, "chi_weight", 0, 0, b));
  return o;
}

Outcome excursions(int threads) {
  const double t = 0.2 * std::pow(64.0, -1.0 / 3.0);
  const auto r = excursion_additivity_check(64, 4, t, opts(100, threads));
  // component-labeling oracle on random path pairs
  const CounterRng rng(kSeed, 10, Tag::test);
  long mismatches = 0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    const bool mesh = k % 2 == 1;
    const int n = 4 + static_cast<int>(k % 29);
    const int m = mesh ? 3 : 1;
    const PathKind kind = mesh ? PathKind::east_north : PathKind::upright;
    const auto da = oracle::random_dep(rng, 2 * k, n * m, n, nullptr);
    const auto db = oracle::random_dep(rng, 2 * k + 1, n * m, n, &da);
    const auto a = oracle::make_path(kind, n, m, da), b = oracle::make_path(kind, n, m, db);
    std::vector<std::pair<int, int>> got;
    for (const auto& e : excursion_decompose(a, b)) got.push_back({e.level_b, e.level_f});
    mismatches += got != oracle::labeled_lifetimes(a, b);
  }
  Outcome o;
  const double id = r.detail("max_identity_error"), slack = r.detail("min_inequality_slack");
  o.pass = r.verdict == Verdict::pass && id <= 1e-9 && slack >= -1e-9 && mismatches == 0;
  o.summary = "identity error=" + fmt(id, 3) + " (<= 1e-9), min inequality slack=" + fmt(slack, 3) +
              " (>= -1e-9 float slack), mean excursions=" + fmt(r.detail("mean_excursions"), 3) + ", labeler mismatches=" +
              std::to_string(mismatches) + "/500";
  o.rows = r.rows;
  o.rows.push_back(row("brownian-mesh", 64, 4, "max_identity_error", t, 0.2, id, 0, 100));
  o.rows.push_back(row("brownian-mesh", 64, 4, "min_inequality_slack", t, 0.2, slack, 0, 100));
  o.rows.push_back(row("mixed", 0, 0, "labeler_mismatches", 0, 0, static_cast<double>(mismatches), 0, 500));
  return o;
}

Outcome proxy(int threads) {
  const int n = 128, m = 4;
  const double scale = std::pow(static_cast<double>(n), -1.0 / 3.0);
  const auto retention = proxy_check(n, m, 1.0 * scale, ProxyParams{}, 0.0, opts(100, threads));
  const auto mimicry = proxy_check(n, m, 0.5 * scale, ProxyParams{}, 0.9, opts(200, threads));
  const double min_ret = std::min(retention.detail("min_retention"), mimicry.detail("min_retention"));
  Outcome o;
  o.pass = min_ret >= 0.5 && mimicry.detail("win_fraction") >= 0.9;
  o.summary = "min retention=" + fmt(min_ret, 3) + " (>= 1/2, 100 instances at tau=1 and 200 at tau=0.5), win fraction=" +
              fmt(mimicry.detail("win_fraction"), 3) + " (>= 0.9, 200 instances, tau=0.5)";
  o.rows = retention.rows;
  o.rows.insert(o.rows.end(), mimicry.rows.begin(), mimicry.rows.end());
  return o;
}

Outcome twin_peaks(int threads) {
  TwinPeaksParams p;
  p.sigmas = {0.05, 0.1, 0.2, 0.4, 0.8};
  const auto r = twin_peaks_and_deficit(128, 8, p, opts(20000, threads));
  Outcome o;
  o.pass = r.monotone && r.slope >= 0.7 && r.slope <= 1.3;
  std::string ps;
  for (std::size_t k = 0; k < p.sigmas.size(); ++k) {
    ps += " " + fmt(r.probability[k].mean, 3);
    o.rows.push_back(row("brownian-mesh", 128, 8, "twin_peaks_probability", 0, p.sigmas[k], r.probability[k]));
  }
  o.summary = std::string("monotone=") + (r.monotone ? "yes" : "no") + ", slope=" + fmt(r.slope, 3) +
              " (in [0.7,1.3]), P:" + ps;
  return o;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome(int)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string only;
  std::string out_dir = "acceptance-out";
  int threads = default_threads();
  app.add_option("--only", only, "comma-separated criterion ids");
  app.add_option("--out", out_dir, "directory for per-criterion CSV files");
  app.add_option("--threads", threads);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "oracle-equivalence", oracle_equivalence},
      {2, "exact-spectral-suite", spectral_suite},
      {3, "two-time-covariance-mc", covariance_mc},
      {4, "dynamical-variance", dynamical_variance},
      {5, "mean-overlap-monotone", overlap_monotone},
      {6, "weight-stability", weight_stability},
      {7, "refinement-monotone", refinement},
      {8, "transition-reproduction", transition},
      {9, "kpz-exponents", exponents},
      {10, "excursion-machinery", excursions},
      {11, "proxy-mimicry", proxy},
      {12, "twin-peaks", twin_peaks},
  };
  std::set<int> selected;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ',')) selected.insert(std::stoi(item));
  }
  auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };
  std::filesystem::create_directories(out_dir);

  int failures = 0;
  std::vector<std::pair<int, std::string>> csvs;
  for (const auto& c : all) {
    if (!wanted(c.id)) continue;
    Outcome o;
    try {
      o = c.run(threads);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    const std::string csv = to_csv(o.rows);
    write_text_file((std::filesystem::path(out_dir) / ("criterion_" + std::to_string(c.id) + ".csv")).string(), csv);
    csvs.emplace_back(c.id, csv);
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.summary << std::endl;
  }

  if (wanted(13)) {
    // Every run above is repeated with the same seed and its CSV compared byte for byte.
    int differing = 0;
    std::string which;
    for (const auto& [id, csv] : csvs) {
      std::string again;
      try {
        again = to_csv(all[static_cast<std::size_t>(id - 1)].run(threads).rows);
      } catch (const std::exception&) {
        again = "error";
      }
      if (again != csv || csv.empty()) {
        ++differing;
        which += " " + std::to_string(id);
      }
    }
    const bool pass = differing == 0 && !csvs.empty();
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " 13 reproducibility: " << csvs.size() << " criteria rerun with seed " << kSeed
              << ", differing CSVs=" << differing << (which.empty() ? "" : " (" + which + " )") << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
