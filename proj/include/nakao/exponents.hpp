#pragma once

// Critical curves, lifespan exponents and blow-up classification for the
// coupled damped-wave / wave system
//
//   u_tt - Δu + u_t = |v|^p,   v_tt - Δv = |u|^q.
//
// The formulas are templated on the scalar type so that the same code can be
// evaluated in binary64 (the default everywhere) or in an exact rational type
// when an algebraic identity must be checked without rounding ties.

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include "nakao/params.hpp"

namespace nakao {

enum class Verdict { BlowUpTheorem23, BlowUpWakasugiOnly, NoBlowUpKnown, Inadmissible };

std::string_view to_string(Verdict verdict);

namespace detail {
template <typename Scalar>
Scalar max2(const Scalar& a, const Scalar& b) {
  return a < b ? b : a;
}
template <typename Scalar>
Scalar max3(const Scalar& a, const Scalar& b, const Scalar& c) {
  return max2(max2(a, b), c);
}
}  // namespace detail

/// Local well-posedness range: p, q > 1, and p, q <= n/(n-2) when n >= 3 (closed).
template <typename Scalar>
bool admissible(int n, const Scalar& p, const Scalar& q) {
  if (!(p > Scalar(1) && q > Scalar(1))) return false;
  if (n <= 2) return true;
  const Scalar cap = Scalar(n) / Scalar(n - 2);
  return p <= cap && q <= cap;
}

inline bool admissible(const ProblemParams& params) {
  return admissible<double>(params.n, params.p, params.q);
}

template <typename Scalar>
struct CriticalCurves {
  Scalar alpha_w;   // wave-wave system
  Scalar alpha_dw;  // damped-damped system
  Scalar alpha_nw;  // test-function condition, compared against n/2 with >=
  Scalar alpha0;
  Scalar alpha1;
  Scalar alpha_n;
  /// (q/2+1)/(pq-1), (2+1/p)/(pq-1), (1/2+p)/(pq-1) - 1/2
  std::array<Scalar, 3> alpha_n_terms;
  Scalar f1, f2, f3, f4;
  /// Dimension case maximum: n=1 {F3,F4}; n=2 all; n=3 {F1,F4}; n>=4 F1.
  Scalar f;
};

template <typename Scalar>
CriticalCurves<Scalar> critical_curves(int n, const Scalar& p, const Scalar& q) {
  using detail::max2;
  using detail::max3;
  const Scalar one(1), two(2), half = Scalar(1) / Scalar(2);
  const Scalar pq1 = p * q - one;
  const Scalar nn(n);

  CriticalCurves<Scalar> c;
  c.alpha_w = max2<Scalar>((p + two + one / q) / pq1, (q + two + one / p) / pq1);
  c.alpha_dw = max2<Scalar>((p + one) / pq1, (q + one) / pq1);
  c.alpha_nw = max3<Scalar>((q * half + one) / pq1 + half, (q + one) / pq1, (p + one) / pq1);

  c.alpha_n_terms = {(q * half + one) / pq1, (two + one / p) / pq1, (half + p) / pq1 - half};
  c.alpha0 = max2<Scalar>(c.alpha_n_terms[0], c.alpha_n_terms[1]);
  c.alpha1 = max2<Scalar>(c.alpha_n_terms[0], c.alpha_n_terms[2]);
  c.alpha_n = max3<Scalar>(c.alpha_n_terms[0], c.alpha_n_terms[1], c.alpha_n_terms[2]);

  c.f1 = (two + one / p) / pq1 - (nn - one) / two;
  c.f2 = (one + two / q) / pq1 - (nn - one) / q;
  c.f3 = (two + q) / pq1 - nn + one;
  c.f4 = (one + two * p) / pq1 - nn;

  switch (n) {
    case 1: c.f = max2<Scalar>(c.f3, c.f4); break;
    case 2: c.f = max2<Scalar>(max2<Scalar>(c.f1, c.f2), max2<Scalar>(c.f3, c.f4)); break;
    case 3: c.f = max2<Scalar>(c.f1, c.f4); break;
    default: c.f = c.f1; break;
  }
  return c;
}

/// Strict α_N > (n-1)/2 for BlowUpTheorem23; the test-function condition uses
/// α_N,W >= n/2. Points exactly on α_N = (n-1)/2 are not claimed.
template <typename Scalar>
Verdict classify(int n, const Scalar& p, const Scalar& q, const CriticalCurves<Scalar>& c) {
  if (!admissible(n, p, q)) return Verdict::Inadmissible;
  if (c.alpha_n > Scalar(n - 1) / Scalar(2)) return Verdict::BlowUpTheorem23;
  if (!(c.alpha_nw < Scalar(n) / Scalar(2))) return Verdict::BlowUpWakasugiOnly;
  return Verdict::NoBlowUpKnown;
}

/// 1-based index of the strictly largest α_N term, or 0 on a tie at the top.
template <typename Scalar>
int binding_term(const CriticalCurves<Scalar>& c) {
  const auto& t = c.alpha_n_terms;
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (t[best] < t[i]) best = i;
  }
  for (int i = 0; i < 3; ++i) {
    if (i != best && !(t[i] < t[best])) return 0;
  }
  return best + 1;
}

struct ExponentReport {
  double alpha_w = 0, alpha_dw = 0, alpha_nw = 0;
  double alpha0 = 0, alpha1 = 0, alphaN = 0;
  double F1 = 0, F2 = 0, F3 = 0, F4 = 0, F = 0;
  bool admissible = false;
  /// α_N,W >= n/2 (the earlier test-function result).
  bool wakasugi = false;
  int binding = 0;
  Verdict verdict = Verdict::Inadmissible;
};

/// Every α-value, F1..F4, F and the verdict. Values are reported even when the
/// point is inadmissible; the verdict then says so.
ExponentReport critical_values(const ProblemParams& params);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// 1 + 2/n.
double fujita_exponent(int n);

/// Positive root of (n-1)p^2 - (n+1)p - 2 = 0; +inf for n = 1.
double strauss_exponent(int n);

/// Positive root of (n-1)p^3 - (n+3)p - 2 = 0 for n >= 2, bracketed in
/// (1, strauss_exponent(n)). Throws std::logic_error if the bracket fails.
double p0_exponent(int n);

/// Upper end of the p = q blow-up range from the test-function result:
/// max{1+2/n, (1+sqrt(4n^2-3))/(2(n-1))}, capped at n/(n-2); +inf for n = 1.
double diagonal_wakasugi_bound(int n);

/// Upper end of the p = q range where α_N > (n-1)/2:
/// max{p0(n), 1+2/n, (1+sqrt(4n^2-3))/(2(n-1))}, capped at n/(n-2); +inf for n = 1.
double diagonal_blowup_bound(int n);

/// n/(n-2) for n >= 3, +inf otherwise.
double admissible_cap(int n);

struct RegionSpec {
  int n = 2;
  double p_lo = 1.05, p_hi = 6.0;
  double q_lo = 1.05, q_hi = 6.0;
  int resolution = 100;  // points per axis, endpoints included
};

struct RegionCell {
  double p = 0, q = 0;
  double alphaN = 0;
  double F = 0;
  Verdict verdict = Verdict::Inadmissible;
  int binding = 0;
};

/// Row-major grid (q outer, p inner) over the closed box. Requires lo > 1,
/// hi >= lo and resolution >= 2; rows are split over `jobs` workers.
std::vector<RegionCell> region_scan(const RegionSpec& spec, int jobs = 1);

/// Grid over the admissible box (1, cap]^2 with `per_axis` points per axis,
/// p_i = 1 + (cap-1) i / per_axis, i = 1..per_axis. For n <= 2, where the box is
/// unbounded, `open_cap` is used as the upper end.
std::vector<std::array<double, 2>> admissible_grid(int n, int per_axis, double open_cap = 6.0);

/// α_N,W = n/2 and α_N = (n-1)/2 traced as q(p) by bisection in q over [q_lo, q_hi].
/// Entries where the curve leaves the window are NaN.
struct CurveTrace {
  std::vector<double> p;
  std::vector<double> q_alpha_n;
  std::vector<double> q_alpha_nw;
};
CurveTrace trace_critical_curves(const RegionSpec& spec, int samples);

}  // namespace nakao
