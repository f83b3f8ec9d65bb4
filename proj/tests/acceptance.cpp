// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/core.h>

#include "nakao/cli.hpp"
#include "nakao/exponents.hpp"
#include "nakao/lifespan.hpp"
#include "nakao/pde.hpp"
#include "nakao/slicing.hpp"
#include "nakao/testfn.hpp"

using namespace nakao;
namespace fs = std::filesystem;
using detail::max2;
using detail::max3;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += fmt::format("; over the {:g} s budget", budget_s);
  }
  if (!o.pass) ++failures;
  fmt::print("{} {}: {} [{:.2f} s] {}\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail);
  std::fflush(stdout);
}

// Grid of admissible_grid(n, per_axis) rebuilt from its integer indices so that
// tie points can be re-evaluated exactly.
struct GridPoint {
  double p, q;
  Rational pr, qr;
};

std::vector<GridPoint> exact_grid(int n, int per_axis) {
  const auto pts = admissible_grid(n, per_axis);
  // cap - 1 = 5 (open box) or 2/(n-2)
  const Rational span = n >= 3 ? Rational(2, n - 2) : Rational(5);
  std::vector<GridPoint> out;
  out.reserve(pts.size());
  for (int j = 1; j <= per_axis; ++j)
    for (int i = 1; i <= per_axis; ++i) {
      const auto& pt = pts[static_cast<std::size_t>((j - 1) * per_axis + (i - 1))];
      out.push_back({pt[0], pt[1], 1 + span * Rational(i, per_axis), 1 + span * Rational(j, per_axis)});
    }
  return out;
}

template <class S>
bool holds_equivalences(int n, const CriticalCurves<S>& c) {
  const S half(S(n - 1) / 2);
  const S zero(0);
  const bool a = (c.alpha0 > half) == (max2<S>(c.f1, c.f2) > zero);
  const bool b = (c.alpha1 > half) == (max2<S>(c.f3, c.f4) > zero);
  const bool d = (c.alpha_n > half) == (max2<S>(max2<S>(c.f1, c.f2), max2<S>(c.f3, c.f4)) > zero);
  return a && b && d;
}

template <class S>
S case_split_max(int n, const CriticalCurves<S>& c) {
  if (n == 1) return max2<S>(c.f3, c.f4);
  if (n == 2) return max2<S>(max2<S>(c.f1, c.f2), max2<S>(c.f3, c.f4));
  if (n == 3) return max2<S>(c.f1, c.f4);
  return c.f1;
}

template <class S>
S t2(const S& p, const S& q) {
  return (S(2) + S(1) / p) / (p * q - S(1));
}

IterationConfig iteration(int n, double p, double q, InitMode mode, double eps = 1.0) {
  IterationConfig c;
  c.init_mode = mode;
  c.params.n = n;
  c.params.p = p;
  c.params.q = q;
  c.params.epsilon = eps;
  return c;
}

ProblemParams problem(int n, double p, double q, double eps) {
  ProblemParams prm;
  prm.n = n;
  prm.p = p;
  prm.q = q;
  prm.epsilon = eps;
  return prm;
}

Numerics numerics(double h, double t_max, double threshold = 1e8) {
  Numerics num;
  num.h = h;
  num.t_max = t_max;
  num.threshold = threshold;
  return num;
}

bool rel_close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); }

// u = (1 + t) e^{-x^2} / 2, v = cos(t) e^{-x^2} / 2 on n = 1, p = q = 2.
double mms_error(double h) {
  auto u_exact = [](double t, double x) { return 0.5 * (1 + t) * std::exp(-x * x); };
  auto v_exact = [](double t, double x) { return 0.5 * std::cos(t) * std::exp(-x * x); };
  const ProblemParams prm = problem(1, 2, 2, 1.0);
  Numerics num = numerics(h, 1.0);
  num.r_max = 8.0;
  SchemeOptions options;
  options.forcing = [](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& fu, Eigen::ArrayXd& fv) {
    const Eigen::ArrayXd g = (-x.square()).exp();
    const Eigen::ArrayXd g_xx = (4 * x.square() - 2) * g;
    const Eigen::ArrayXd u = 0.5 * (1 + t) * g;
    const Eigen::ArrayXd v = 0.5 * std::cos(t) * g;
    fu = -0.5 * (1 + t) * g_xx + 0.5 * g - v.square();
    fv = -0.5 * std::cos(t) * g - 0.5 * std::cos(t) * g_xx - u.square();
  };
  RadialField f = make_initial_data({DataShape::Bump, 0, 0, 0, 0}, prm, num, options);
  for (Eigen::Index i = 0; i < f.grid.x.size(); ++i) {
    const double x = f.grid.x(i);
    f.u_now(i) = u_exact(0, x);
    f.v_now(i) = v_exact(0, x);
    f.u_prev(i) = u_exact(-f.dt, x);
    f.v_prev(i) = v_exact(-f.dt, x);
  }
  const int steps = static_cast<int>(std::lround(1.0 / f.dt));
  for (int k = 0; k < steps; ++k)
    if (step(f, prm, 1e8, options) != StepStatus::Ok) return INFINITY;
  double err = 0.0;
  for (Eigen::Index i = 0; i < f.grid.x.size(); ++i) {
    const double x = f.grid.x(i);
    err = std::max({err, std::abs(f.u_now(i) - u_exact(f.t, x)), std::abs(f.v_now(i) - v_exact(f.t, x))});
  }
  return err;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream s;
  s << file.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  criterion(1, "region algebra equivalences, n = 1..10, 10^4 points each", 10.0, [] {
    long points = 0, ties = 0, bad = 0;
    for (int n = 1; n <= 10; ++n) {
      for (const GridPoint& g : exact_grid(n, 100)) {
        ++points;
        if (holds_equivalences(n, critical_curves<double>(n, g.p, g.q))) continue;
        ++ties;
        if (!holds_equivalences(n, critical_curves<Rational>(n, g.pr, g.qr))) ++bad;
      }
    }
    return Outcome{bad == 0, fmt::format("{} points, {} counterexamples ({} binary64 ties settled exactly)", points, bad, ties)};
  });

  criterion(2, "case split of max F_i on blow-up points", 10.0, [] {
    long checked = 0, ties = 0, bad = 0;
    std::map<int, long> per_n;
    std::string witness;
    for (int n = 1; n <= 10; ++n) {
      for (const GridPoint& g : exact_grid(n, 100)) {
        const auto c = critical_curves<double>(n, g.p, g.q);
        if (classify(n, g.p, g.q, c) != Verdict::BlowUpTheorem23) continue;
        ++checked;
        const double all = max3<double>(c.f1, c.f2, max2<double>(c.f3, c.f4));
        if (case_split_max(n, c) == all && c.f == all) continue;
        ++ties;
        const auto e = critical_curves<Rational>(n, g.pr, g.qr);
        const Rational exact_all = max3<Rational>(e.f1, e.f2, max2<Rational>(e.f3, e.f4));
        if (case_split_max(n, e) != exact_all || e.f != case_split_max(n, e)) {
          ++bad;
          ++per_n[n];
          if (witness.empty())
            witness = fmt::format("; e.g. n = {}, p = {}, q = {}: case split {:.6f}, max F_i {:.6f} (F4 - F1 = {} exactly)", n,
                                  g.pr.str(), g.qr.str(), static_cast<double>(case_split_max(n, e)),
                                  static_cast<double>(exact_all), Rational(e.f4 - e.f1).str());
        }
      }
    }
    std::string by_n;
    for (const auto& [n, k] : per_n) by_n += fmt::format(" n={}:{}", n, k);
    return Outcome{bad == 0 && checked > 0, fmt::format("{} blow-up points, {} counterexamples{} ({} settled exactly){}",
                                                        checked, bad, by_n.empty() ? "" : " by dimension" + by_n, ties, witness)};
  });

  criterion(3, "remarks for n = 3..10", 10.0, [] {
    long bad_t2 = 0, bad_full = 0, bad_subset = 0, ties = 0;
    for (int n = 3; n <= 10; ++n) {
      for (const GridPoint& g : exact_grid(n, 100)) {
        const double half = 0.5 * (n - 1);
        const auto c = critical_curves<double>(n, g.p, g.q);
        const bool ok_t2 = (c.alpha_n > half) == (t2(g.p, g.q) > half);
        const bool ok_subset = !(c.alpha1 > half) || c.alpha0 > half;
        if (!ok_t2 || !ok_subset) {
          ++ties;
          const auto e = critical_curves<Rational>(n, g.pr, g.qr);
          const Rational rh(n - 1, 2);
          if ((e.alpha_n > rh) != (t2(g.pr, g.qr) > rh)) ++bad_t2;
          if (e.alpha1 > rh && !(e.alpha0 > rh)) ++bad_subset;
        }
        if (n >= 8 && critical_values(problem(n, g.p, g.q, 1.0)).verdict != Verdict::BlowUpTheorem23) ++bad_full;
      }
    }
    return Outcome{bad_t2 + bad_full + bad_subset == 0,
                   fmt::format("counterexamples: T2 form {}, n >= 8 full box {}, alpha_1 inside alpha_0 {} ({} settled exactly)",
                               bad_t2, bad_full, bad_subset, ties)};
  });

  criterion(4, "Strauss and p0 roots", 0, [] {
    bool ok = std::abs(strauss_exponent(3) - (1 + std::sqrt(2.0))) < 1e-12 &&
              std::abs(p0_exponent(2) - (1 + std::sqrt(2.0))) < 1e-12;
    double worst = 0.0;
    for (int n = 2; n <= 12; ++n) {
      const double s = strauss_exponent(n), p = p0_exponent(n);
      ok = ok && p < s;
      worst = std::max({worst, std::abs((n - 1) * s * s - (n + 1) * s - 2), std::abs((n - 1) * p * p * p - (n + 3) * p - 2)});
    }
    ok = ok && worst < 1e-12;
    return Outcome{ok, fmt::format("max polynomial residual {:.1e}", worst)};
  });

  criterion(5, "slicing closed forms, sum identity, log D bound", 1.0, [] {
    const std::vector<std::array<double, 3>> configs = {
        {1, 2, 2},   {1, 1.5, 4},  {1, 5, 1.2},  {2, 2, 2},     {2, 1.5, 3},   {2, 3, 1.4},    {3, 1.5, 2},
        {3, 2, 2},   {3, 3, 1.5},  {4, 1.5, 1.5}, {5, 1.4, 1.6}, {7, 1.3, 1.35}, {10, 1.2, 1.25}};
    long compared = 0, bad_cf = 0, bad_sum = 0, bad_log = 0, log_checked = 0;
    for (const auto& c : configs)
      for (InitMode mode : {InitMode::Prop1, InitMode::Prop2}) {
        const IterationConfig cfg = iteration(static_cast<int>(c[0]), c[1], c[2], mode);
        for (const SlicingState& s : iterate(cfg, 41)) {
          if (s.j % 2 == 0) continue;
          const ExponentTuple e = closed_form_exponents(s.j, cfg);
          ++compared;
          if (!rel_close(s.alpha, e.alpha, 1e-10) || !rel_close(s.a, e.a, 1e-10) || !rel_close(s.beta, e.beta, 1e-10) ||
              !rel_close(s.b, e.b, 1e-10))
            ++bad_cf;
        }
      }
    for (double pq : {2.25, 4.0, 6.25})
      for (int j = 3; j <= 21; j += 2) {
        double brute = 0.0;
        for (int k = 1; k <= (j - 1) / 2; ++k) brute += (j + 2 - 2 * k) * std::pow(pq, k - 1);
        const SumIdentity s = weighted_sum_identity(j, pq);
        if (std::abs(s.rhs - brute) > 1e-12 * brute || std::abs(s.lhs - brute) > 1e-12 * brute) ++bad_sum;
      }
    for (const auto& c : configs) {
      const IterationConfig cfg = iteration(static_cast<int>(c[0]), c[1], c[2], InitMode::Prop1);
      if (critical_values(cfg.params).verdict != Verdict::BlowUpTheorem23) continue;
      const Thresholds th = thresholds(cfg);
      const auto states = iterate(cfg, 41);
      for (int j = std::max(th.j0, th.j1); j <= 41; j += 2) {
        ++log_checked;
        const LogLowerBounds lb = log_lower_bounds(j, cfg);
        if (states[j - 1].logD < lb.logD_lower) ++bad_log;
      }
    }
    return Outcome{bad_cf + bad_sum + bad_log == 0 && log_checked > 0,
                   fmt::format("{} closed-form tuples over {} configs x 2 modes ({} off), sum identity {} off, "
                               "log D bound {} off of {}",
                               compared, configs.size(), bad_cf, bad_sum, bad_log, log_checked)};
  });

  criterion(6, "test-function checks", 0, [] {
    std::vector<double> r;
    for (double x = 0.0; x <= 5.0 + 1e-12; x += 0.05) r.push_back(x);
    double min_order = 1e9, worst_wave = 0.0, worst_drift = 0.0, worst_tail = 0.0;
    std::vector<double> t_grid, r_wave;
    for (double t = 0.0; t <= 10.0 + 1e-12; t += 0.5) t_grid.push_back(t);
    for (double x = 0.25; x <= 20.0 + 1e-12; x += 0.25) r_wave.push_back(x);
    bool ok = true;
    for (int n : {1, 2, 3}) {
      const EigenfunctionEvaluator phi(n);
      min_order = std::min(min_order, std::log2(laplacian_residual(phi, r, 0.02) / laplacian_residual(phi, r, 0.01)));
      const double h = 1e-2;
      const double wave = wave_residual(phi, t_grid, r_wave, h);
      ok = ok && wave < h * h / 6 + 1e-9;
      worst_wave = std::max(worst_wave, wave);
      double lo = 1e300, hi = 0.0;
      for (double x = 20.0; x <= 60.0; x += 1.0) {
        const double ratio = std::pow(x, 0.5 * (n - 1)) * phi.phi_scaled(x);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      worst_drift = std::max(worst_drift, (hi - lo) / hi);
      std::vector<double> ratios;
      for (double t = 0.0; t <= 50.0; t += 0.5) ratios.push_back(psi_holder_ratio(phi, t, 2.0, 1.0));
      for (double v : ratios) ok = ok && std::isfinite(v);
      const auto tail = std::minmax_element(ratios.begin() + static_cast<long>(ratios.size() / 2), ratios.end());
      worst_tail = std::max(worst_tail, *tail.second / *tail.first);
    }
    ok = ok && min_order >= 1.9 && worst_drift < 0.01 && worst_tail < 1.1;
    return Outcome{ok, fmt::format("Laplacian order >= {:.3f}, wave residual {:.2e}, asymptotic drift {:.2e}, "
                                   "Hoelder tail spread {:.3f}",
                                   min_order, worst_wave, worst_drift, worst_tail)};
  });

  criterion(7, "simulator correctness", 0, [] {
    const double e1 = mms_error(0.04), e2 = mms_error(0.02), e3 = mms_error(0.01);
    const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e3));

    const FunctionalTrace a = run(problem(1, 2, 2, 0.1), {}, numerics(0.02, 2.0));
    const FunctionalTrace b = run(problem(1, 2, 2, 0.1), {}, numerics(0.01, 2.0));
    const double ratio_u = a.balance_u / b.balance_u, ratio_v = a.balance_v / b.balance_v;
    const bool balance_ok = std::abs(ratio_u - 4) < 0.6 && std::abs(ratio_v - 4) < 0.6;

    std::vector<FunctionalTrace> runs{a, b};
    for (int n : {1, 2, 3})
      for (double eps : {0.5, 0.1}) runs.push_back(run(problem(n, 2, 2, eps), {}, numerics(0.02, 20.0)));
    double worst_excess = -1e9;  // in units of h
    int worst_n = 0;
    long sign_bad = 0, mono_bad = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const FunctionalTrace& tr = runs[i];
      const int n = i < 2 ? 1 : static_cast<int>(1 + (i - 2) / 2);
      double rate_prev = -1e300;
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double excess = (std::max(tr.support_u[k], tr.support_v[k]) - 1.0 - tr.times[k]) / tr.h;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst_n = n;
        }
        if (tr.U[k] < 0.0 || tr.V[k] < 0.0) ++sign_bad;
        if (k >= 1 && k + 1 < tr.times.size()) {
          const double rate = (tr.V[k + 1] - tr.V[k - 1]) / (2 * tr.dt);
          if (rate < rate_prev - 1e-12 * std::abs(rate)) ++mono_bad;
          rate_prev = rate;
        }
      }
    }
    const bool ok = order >= 1.9 && balance_ok && worst_excess <= 2.0 && sign_bad == 0 && mono_bad == 0;
    return Outcome{ok, fmt::format("MMS order {:.3f}; balance ratios {:.2f} / {:.2f}; worst support excess "
                                   "{:.1f} h (n = {}, {} runs); sign violations {}; V' decreases {}",
                                   order, ratio_u, ratio_v, worst_excess, worst_n, runs.size(), sign_bad, mono_bad)};
  });

  criterion(8, "lifespan scaling n = 1, p = q = 2", 300.0, [] {
    const std::vector<double> ladder{0.4, 0.3, 0.2, 0.15, 0.1};
    const ProblemParams prm = problem(1, 2, 2, 1.0);
    const LifespanFit base = sweep(prm, ladder, numerics(0.02, 60.0));
    const LifespanFit low = sweep(prm, ladder, numerics(0.02, 60.0, 1e6));
    const LifespanFit fine = sweep(prm, ladder, numerics(0.01, 60.0));
    const bool all_blow = base.missing.empty() && low.missing.empty() && fine.missing.empty() && base.fitted &&
                          low.fitted && fine.fitted;
    const double shift_thr = std::abs(low.fitted_slope - base.fitted_slope);
    const double shift_h = std::abs(fine.fitted_slope - base.fitted_slope);
    const bool ok = all_blow && base.fitted_slope <= 0.75 * 1.35 && shift_thr < 0.1 && shift_h < 0.05;
    return Outcome{ok, fmt::format("slope {:.4f} (+/- {:.4f}) vs bound {:.4f}; threshold shift {:.4f}; h/2 shift {:.4f}",
                                   base.fitted_slope, base.slope_stderr, 0.75 * 1.35, shift_thr, shift_h)};
  });

  criterion(9, "byte-identical reruns of every subcommand", 0, [] {
    const fs::path dir = fs::current_path() / "acceptance_scratch";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> cmds = {
        {"region", "--n", "3", "--grid", "80"},
        {"curves"},
        {"sequences", "--n", "1", "--p", "2", "--q", "2"},
        {"testfn"},
        {"simulate", "--T_max", "10"},
        {"sweep"},
        {"report"}};
    std::map<std::string, std::string> first;
    long files = 0, differ = 0;
    for (int pass = 0; pass < 2; ++pass) {
      for (auto cmd : cmds) {
        const std::string prefix = (dir / cmd.front()).string();
        cmd.insert(cmd.end(), {"--out", prefix});
        if (pass == 1 && cmd.front() == "region") cmd.insert(cmd.end(), {"--jobs", "3"});
        std::ostringstream out, err;
        const int code = dispatch(cmd, out, err);
        if (code != 0) return Outcome{false, fmt::format("{} exited {}: {}", cmd.front(), code, err.str())};
        for (const char* ext : {".csv", ".svg", ".json"}) {
          const fs::path path = prefix + ext;
          if (!fs::exists(path)) continue;
          if (pass == 0) {
            first[path.string()] = slurp(path);
            ++files;
          } else if (slurp(path) != first[path.string()]) {
            ++differ;
          }
        }
        const std::string key = "stdout:" + cmd.front();
        if (pass == 0)
          first[key] = out.str();
        else if (out.str() != first[key])
          ++differ;
      }
    }
    return Outcome{differ == 0, fmt::format("{} subcommands, {} files, {} differences", cmds.size(), files, differ)};
  });

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
