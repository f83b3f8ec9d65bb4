#include "nakao/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace nakao {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::BlowUpTheorem23: return "BlowUpTheorem23";
    case Verdict::BlowUpWakasugiOnly: return "BlowUpWakasugiOnly";
    case Verdict::NoBlowUpKnown: return "NoBlowUpKnown";
    case Verdict::Inadmissible: return "Inadmissible";
  }
  return "Unknown";
}

ExponentReport critical_values(const ProblemParams& params) {
  validate(params);
  const auto c = critical_curves<double>(params.n, params.p, params.q);
  ExponentReport r;
  r.alpha_w = c.alpha_w;
  r.alpha_dw = c.alpha_dw;
  r.alpha_nw = c.alpha_nw;
  r.alpha0 = c.alpha0;
  r.alpha1 = c.alpha1;
  r.alphaN = c.alpha_n;
  r.F1 = c.f1;
  r.F2 = c.f2;
  r.F3 = c.f3;
  r.F4 = c.f4;
  r.F = c.f;
  r.admissible = admissible(params);
  r.wakasugi = !(c.alpha_nw < params.n / 2.0);
  r.binding = binding_term(c);
  r.verdict = classify(params.n, params.p, params.q, c);
  return r;
}

double fujita_exponent(int n) {
  if (n < 1) throw std::invalid_argument("fujita_exponent: n must be >= 1");
  return 1.0 + 2.0 / n;
}

double strauss_exponent(int n) {
  if (n < 1) throw std::invalid_argument("strauss_exponent: n must be >= 1");
  if (n == 1) return kInfinity;
  const double a = n - 1.0;
  const double b = -(n + 1.0);
  const double disc = b * b + 8.0 * a;
  return (-b + std::sqrt(disc)) / (2.0 * a);
}

namespace {

// Bisection to bracket width `width`, then one Newton step kept only if it
// lands inside the final bracket with a smaller residual.
double bracketed_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                      double lo, double hi, double width) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw std::logic_error("bracketed_root: no sign change in bracket");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double slope = df(x);
  if (slope != 0.0) {
    const double polished = x - f(x) / slope;
    if (polished >= lo && polished <= hi && std::abs(f(polished)) <= std::abs(f(x))) x = polished;
  }
  return x;
}

}  // namespace

double p0_exponent(int n) {
  if (n < 2) throw std::invalid_argument("p0_exponent: n must be >= 2");
  const double a = n - 1.0, b = n + 3.0;
  auto cubic = [=](double p) { return a * p * p * p - b * p - 2.0; };
  auto slope = [=](double p) { return 3.0 * a * p * p - b; };
  return bracketed_root(cubic, slope, 1.0, strauss_exponent(n), 1e-14);
}

double admissible_cap(int n) { return n >= 3 ? static_cast<double>(n) / (n - 2) : kInfinity; }

double diagonal_wakasugi_bound(int n) {
  if (n < 1) throw std::invalid_argument("diagonal_wakasugi_bound: n must be >= 1");
  if (n == 1) return kInfinity;
  const double wave_like = (1.0 + std::sqrt(4.0 * n * n - 3.0)) / (2.0 * (n - 1));
  return std::min(std::max(fujita_exponent(n), wave_like), admissible_cap(n));
}

double diagonal_blowup_bound(int n) {
  if (n < 1) throw std::invalid_argument("diagonal_blowup_bound: n must be >= 1");
  if (n == 1) return kInfinity;
  return std::min(std::max(p0_exponent(n), diagonal_wakasugi_bound(n)), admissible_cap(n));
}

std::vector<RegionCell> region_scan(const RegionSpec& spec, int jobs) {
  if (spec.n < 1) throw std::invalid_argument("region_scan: n must be >= 1");
  if (!(spec.p_lo > 1.0) || !(spec.q_lo > 1.0)) throw std::invalid_argument("region_scan: ranges must lie in (1, inf)");
  if (spec.p_hi < spec.p_lo || spec.q_hi < spec.q_lo) throw std::invalid_argument("region_scan: empty range");
  if (spec.resolution < 2) throw std::invalid_argument("region_scan: resolution must be >= 2");

  const int res = spec.resolution;
  std::vector<RegionCell> cells(static_cast<std::size_t>(res) * res);
  auto axis = [res](double lo, double hi, int i) { return lo + (hi - lo) * (static_cast<double>(i) / (res - 1)); };

  auto fill_rows = [&](int row_begin, int row_end) {
    for (int iq = row_begin; iq < row_end; ++iq) {
      const double q = axis(spec.q_lo, spec.q_hi, iq);
      for (int ip = 0; ip < res; ++ip) {
        const double p = axis(spec.p_lo, spec.p_hi, ip);
        const auto c = critical_curves<double>(spec.n, p, q);
        RegionCell& cell = cells[static_cast<std::size_t>(iq) * res + ip];
        cell.p = p;
        cell.q = q;
        cell.alphaN = c.alpha_n;
        cell.F = c.f;
        cell.verdict = classify(spec.n, p, q, c);
        cell.binding = binding_term(c);
      }
    }
  };

  const int workers = std::clamp(jobs, 1, res);
  if (workers == 1) {
    fill_rows(0, res);
    return cells;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    const int begin = res * w / workers;
    const int end = res * (w + 1) / workers;
    pool.emplace_back(fill_rows, begin, end);
  }
  for (auto& t : pool) t.join();
  return cells;
}

std::vector<std::array<double, 2>> admissible_grid(int n, int per_axis, double open_cap) {
  if (per_axis < 1) throw std::invalid_argument("admissible_grid: per_axis must be >= 1");
  const double cap = n >= 3 ? admissible_cap(n) : open_cap;
  std::vector<std::array<double, 2>> grid;
  grid.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (int j = 1; j <= per_axis; ++j) {
    const double q = 1.0 + (cap - 1.0) * (static_cast<double>(j) / per_axis);
    for (int i = 1; i <= per_axis; ++i) {
      const double p = 1.0 + (cap - 1.0) * (static_cast<double>(i) / per_axis);
      grid.push_back({p, q});
    }
  }
  return grid;
}

CurveTrace trace_critical_curves(const RegionSpec& spec, int samples) {
  if (samples < 2) throw std::invalid_argument("trace_critical_curves: samples must be >= 2");
  CurveTrace trace;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int n = spec.n;

  // Both α_N(p, ·) and α_N,W(p, ·) are strictly decreasing in q.
  auto level_set = [&](double p, auto&& g) {
    double lo = spec.q_lo, hi = spec.q_hi;
    double glo = g(p, lo), ghi = g(p, hi);
    if (glo < 0.0 || ghi > 0.0) return nan;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(p, mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto g_n = [n](double p, double q) { return critical_curves<double>(n, p, q).alpha_n - (n - 1) / 2.0; };
  auto g_nw = [n](double p, double q) { return critical_curves<double>(n, p, q).alpha_nw - n / 2.0; };

  for (int i = 0; i < samples; ++i) {
    const double p = spec.p_lo + (spec.p_hi - spec.p_lo) * (static_cast<double>(i) / (samples - 1));
    trace.p.push_back(p);
    trace.q_alpha_n.push_back(level_set(p, g_n));
    trace.q_alpha_nw.push_back(level_set(p, g_nw));
  }
  return trace;
}

}  // namespace nakao
