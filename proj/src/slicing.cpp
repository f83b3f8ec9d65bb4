#include "nakao/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nakao/exponents.hpp"
#include "nakao/testfn.hpp"

namespace nakao {

std::string_view to_string(InitMode mode) { return mode == InitMode::Prop1 ? "prop1" : "prop2"; }

std::string_view to_string(ConstantMode mode) {
  return mode == ConstantMode::UnitConstants ? "unit" : "explicit";
}

namespace {

double product_pq(const IterationConfig& config) { return config.params.p * config.params.q; }

void require_odd(int j, const char* who) {
  if (j < 1 || j % 2 == 0) throw std::invalid_argument(std::string(who) + ": j must be an odd integer >= 1");
}

int round_up_to_odd(double raw) {
  double up = std::ceil(raw);
  if (up < 1.0) return 1;
  if (up > 1e6) throw std::overflow_error("threshold index out of range");
  int j = static_cast<int>(up);
  return j % 2 == 0 ? j + 1 : j;
}

// 1 - e^{-1/2}, from ∫_{t/2}^t e^{τ-t} dτ >= 1 - e^{-1/2} for t >= 1.
const double kHalfLogGap = std::log1p(-std::exp(-0.5));

}  // namespace

FrameConstants frame_constants(const IterationConfig& config) {
  FrameConstants fc;
  if (config.constant_mode == ConstantMode::UnitConstants) return fc;
  const auto& prm = config.params;
  const auto& m = config.measured;
  if (!(m.c1 > 0.0 && m.c4 > 0.0 && m.c0_tilde > 0.0 && m.c1_tilde > 0.0))
    throw std::invalid_argument("measured constants must be positive");

  // Hölder on |x| <= R+t: ∫|w|^s >= |B_1|^{-(s-1)} (R+t)^{-n(s-1)} (∫w)^s.
  const double log_ball = std::log(ball_volume(prm.n));
  fc.log_c0 = std::min(-(prm.p - 1.0) * log_ball, -(prm.q - 1.0) * log_ball);
  fc.log_c2_tilde = -(prm.q - 1.0) * log_ball;
  fc.log_c3_tilde = -(prm.p - 1.0) * log_ball;

  const EigenfunctionEvaluator phi(prm.n);
  fc.log_c2 = std::log(calibrate_holder_constant(phi, prm.p, prm.R, m.holder_t_max));
  fc.log_c3 = prm.p * std::log(m.c1) + (1.0 - prm.p) * fc.log_c2;
  return fc;
}

double slice_factor(int k, double pq) {
  if (k < 1) throw std::invalid_argument("slice_factor: k must be >= 1");
  if (!(pq > 1.0)) throw std::invalid_argument("slice_factor: pq must be > 1");
  return 1.0 + std::pow(pq, 0.5 * (1 - k));
}

double partial_product(int j, double pq) {
  if (j < 1) throw std::invalid_argument("partial_product: j must be >= 1");
  double log_sum = 0.0;
  for (int k = 1; k <= j; ++k) log_sum += std::log(slice_factor(k, pq));
  return std::exp(log_sum);
}

ProductLimit product_limit(double pq, double tol) {
  if (!(pq > 1.0)) throw std::invalid_argument("product_limit: pq must be > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("product_limit: tol must be > 0");
  const double ratio = 1.0 / std::sqrt(pq);
  ProductLimit out;
  double sum = 0.0, compensation = 0.0;
  double power = 1.0;  // ratio^{k-1}
  int k = 0;
  double tail = 1.0 / (1.0 - ratio);
  while (tail >= tol) {
    ++k;
    const double term = std::log1p(power) - compensation;
    const double next = sum + term;
    compensation = (next - sum) - term;
    sum = next;
    power *= ratio;
    // Σ_{i>k} ratio^{i-1} = ratio^k / (1 - ratio), and log(1+x) <= x.
    tail = power / (1.0 - ratio);
    if (k > 100000) throw std::runtime_error("product_limit: no convergence");
  }
  out.terms = k;
  out.log_value = sum;
  out.value = std::exp(sum);
  out.log_error_bound = tail;
  return out;
}

SlicingState initial_bounds(const IterationConfig& config) {
  const auto& prm = config.params;
  validate(prm);
  if (!admissible(prm)) throw std::invalid_argument("initial_bounds: parameters are not admissible");
  const FrameConstants fc = frame_constants(config);
  const bool unit = config.constant_mode == ConstantMode::UnitConstants;
  const double n = prm.n, p = prm.p, q = prm.q;
  const double log_eps = std::log(prm.epsilon);

  SlicingState s;
  s.j = 1;
  s.ell = slice_factor(1, p * q);
  s.L = s.ell;
  if (config.init_mode == InitMode::Prop1) {
    s.alpha = (n - 1.0) * p / 2.0;
    s.a = 0.0;
    s.beta = n;
    s.b = 1.0;
    s.logD = fc.log_c3 + kHalfLogGap + p * log_eps - std::log(n) - n * std::log(2.0);
    s.logQ = (unit ? 0.0 : std::log(config.measured.c4)) + log_eps;
  } else {
    s.alpha = n * (p - 1.0);
    s.a = n * (q - 1.0);
    s.beta = p + 1.0;
    s.b = 2.0;
    const double log_c1t = unit ? 0.0 : std::log(config.measured.c1_tilde);
    const double log_c0t = unit ? 0.0 : std::log(config.measured.c0_tilde);
    s.logD = p * log_c1t + fc.log_c3_tilde + kHalfLogGap + p * log_eps - std::log(p + 1.0) -
             (p + 1.0) * std::log(2.0);
    s.logQ = q * log_c0t + fc.log_c2_tilde + q * log_eps - std::log(2.0);
  }
  return s;
}

namespace {

SlicingState step_with(const SlicingState& s, const ProblemParams& prm, double log_c0) {
  const double n = prm.n, p = prm.p, q = prm.q, pq = p * q;
  SlicingState next;
  next.j = s.j + 1;
  next.ell = slice_factor(next.j, pq);
  next.L = s.L * next.ell;

  const double pb1 = p * s.b + 1.0;
  next.logD = log_c0 + p * s.logQ + std::log(std::sqrt(pq) - 0.5) - s.j * std::log(pq) - std::log(pb1) -
              pb1 * std::log(next.ell);
  next.logQ = log_c0 + q * s.logD - std::log(q * s.beta + 1.0) - std::log(q * s.beta + 2.0);

  next.alpha = n * (p - 1.0) + p * s.a;
  next.beta = pb1;
  next.a = n * (q - 1.0) + q * s.alpha;
  next.b = q * s.beta + 2.0;
  return next;
}

}  // namespace

SlicingState step(const SlicingState& state, const IterationConfig& config) {
  return step_with(state, config.params, frame_constants(config).log_c0);
}

std::vector<SlicingState> iterate(const IterationConfig& config, int jmax) {
  if (jmax < 1) throw std::invalid_argument("iterate: jmax must be >= 1");
  const double log_c0 = frame_constants(config).log_c0;
  std::vector<SlicingState> states;
  states.reserve(jmax);
  states.push_back(initial_bounds(config));
  while (static_cast<int>(states.size()) < jmax) states.push_back(step_with(states.back(), config.params, log_c0));
  return states;
}

namespace {

ExponentTuple start_exponents(const IterationConfig& config) {
  const auto& prm = config.params;
  const double n = prm.n, p = prm.p, q = prm.q;
  if (config.init_mode == InitMode::Prop1) return {(n - 1.0) * p / 2.0, 0.0, n, 1.0};
  return {n * (p - 1.0), n * (q - 1.0), p + 1.0, 2.0};
}

}  // namespace

ExponentTuple closed_form_exponents(int j, const IterationConfig& config) {
  require_odd(j, "closed_form_exponents");
  const auto& prm = config.params;
  const double n = prm.n, p = prm.p, q = prm.q, pq = p * q;
  const ExponentTuple first = start_exponents(config);
  if (j == 1) return first;
  const double growth = std::pow(pq, (j - 1) / 2);
  const double cb = (2.0 * p + 1.0) / (pq - 1.0);
  const double cq = (q + 2.0) / (pq - 1.0);
  return {(n + first.alpha) * growth - n, (n + first.a) * growth - n, (cb + first.beta) * growth - cb,
          (cq + first.b) * growth - cq};
}

std::array<double, 2> even_beta_b(int j, const IterationConfig& config) {
  if (j < 2 || j % 2 != 0) throw std::invalid_argument("even_beta_b: j must be an even integer >= 2");
  const auto& prm = config.params;
  const double p = prm.p, q = prm.q, pq = p * q;
  const ExponentTuple first = start_exponents(config);
  const double growth = std::pow(pq, j / 2);
  const double cb = (2.0 * p + 1.0) / (pq - 1.0);
  const double cq = (q + 2.0) / (pq - 1.0);
  return {(cq + first.b) / q * growth - cb, (cb + first.beta) / p * growth - cq};
}

SumIdentity weighted_sum_identity(int j, double pq) {
  require_odd(j, "weighted_sum_identity");
  if (!(pq > 1.0)) throw std::invalid_argument("weighted_sum_identity: pq must be > 1");
  SumIdentity out;
  double power = 1.0;
  for (int k = 1; k <= (j - 1) / 2; ++k) {
    out.lhs += (j + 2.0 - 2.0 * k) * power;
    power *= pq;
  }
  const double m = (j - 1) / 2.0;
  out.rhs = (1.0 / (pq - 1.0)) *
            ((2.0 * pq / (pq - 1.0)) * (1.5 * std::pow(pq, m) - 0.5 * std::pow(pq, m - 1.0) - 1.0) - j);
  return out;
}

GrowthConstants growth_constants(const IterationConfig& config, int jsup) {
  const auto& prm = config.params;
  const double p = prm.p, q = prm.q, pq = p * q;
  const ExponentTuple first = start_exponents(config);
  const double cb = (2.0 * p + 1.0) / (pq - 1.0);
  const double cq = (q + 2.0) / (pq - 1.0);

  GrowthConstants g;
  // Odd j: β_j/(pq)^{(j-1)/2} increases to cb + β_1; even j: β_j/(pq)^{j/2} to (cq + b_1)/q.
  g.B0 = std::max(cb + first.beta, (cq + first.b) / q);
  g.B0_tilde = std::max(cq + first.b, (cb + first.beta) / p);

  const auto states = iterate(config, jsup);
  for (const auto& s : states) {
    const double scale = std::pow(pq, s.j / 2);
    g.B0_sup = std::max(g.B0_sup, s.beta / scale);
    g.B0_tilde_sup = std::max(g.B0_tilde_sup, s.b / scale);
  }

  const double log_c0 = frame_constants(config).log_c0;
  const double log_gap = std::log(std::sqrt(pq) - 0.5);
  const double log_M = -g.B0 * std::sqrt(pq);
  g.M = std::exp(log_M);
  g.log_E0 = (p + 1.0) * log_c0 + log_M + log_gap - std::log(g.B0) - 2.0 * p * std::log(g.B0_tilde);
  g.log_E0_tilde = (q + 1.0) * log_c0 + q * log_M + q * log_gap - q * std::log(g.B0) - 2.0 * std::log(g.B0_tilde);

  const SlicingState s1 = states.front();
  const double lpq = std::log(pq);
  const double denom = (pq - 1.0) * (pq - 1.0);
  g.log_E1_eps = s1.logD + lpq * (1.0 - 7.0 * pq - 4.0 * p * p * q) / (2.0 * denom) + g.log_E0 / (pq - 1.0);
  g.log_E1_tilde_eps =
      s1.logQ + lpq * (-2.0 * p * q * q - 3.0 * pq - q + 1.0) / denom + g.log_E0_tilde / (pq - 1.0);
  return g;
}

Thresholds thresholds(const IterationConfig& config) {
  const auto& prm = config.params;
  const double p = prm.p, q = prm.q, pq = p * q, lpq = std::log(pq);
  const GrowthConstants g = growth_constants(config);
  Thresholds t;
  t.j0_raw = 2.0 * (p + 1.0) / (3.0 + 2.0 * p) + 2.0 * g.log_E0 / ((3.0 + 2.0 * p) * lpq) - 2.0 * pq / (pq - 1.0);
  t.j1_raw = 5.0 * q / (2.0 + 3.0 * q) + 2.0 * g.log_E0_tilde / ((2.0 + 3.0 * q) * lpq) - 2.0 * pq / (pq - 1.0);
  t.j0 = round_up_to_odd(t.j0_raw);
  t.j1 = round_up_to_odd(t.j1_raw);
  return t;
}

LogLowerBounds log_lower_bounds(int j, const IterationConfig& config) {
  require_odd(j, "log_lower_bounds");
  const double pq = product_pq(config);
  const GrowthConstants g = growth_constants(config);
  const double growth = std::pow(pq, (j - 1) / 2);
  return {growth * g.log_E1_eps, growth * g.log_E1_tilde_eps};
}

double log_u_lower(int j, double t, const IterationConfig& config) {
  const double L = product_limit(product_pq(config)).value;
  if (!(t > L)) throw std::invalid_argument("log_u_lower: t must exceed the slicing limit L");
  const ExponentTuple e = closed_form_exponents(j, config);
  return log_lower_bounds(j, config).logD_lower - e.alpha * std::log(config.params.R + t) + e.beta * std::log(t - L);
}

double log_v_lower(int j, double t, const IterationConfig& config) {
  const double L = product_limit(product_pq(config)).value;
  if (!(t > L)) throw std::invalid_argument("log_v_lower: t must exceed the slicing limit L");
  const ExponentTuple e = closed_form_exponents(j, config);
  return log_lower_bounds(j, config).logQ_lower - e.a * std::log(config.params.R + t) + e.b * std::log(t - L);
}

LifespanUpperBound lifespan_upper_bound(const IterationConfig& config) {
  const auto& prm = config.params;
  const ExponentReport report = critical_values(prm);
  if (report.verdict != Verdict::BlowUpTheorem23)
    throw std::domain_error("lifespan_upper_bound: no blow-up claimed for these parameters");

  const double n = prm.n, p = prm.p, q = prm.q, pq = p * q;
  const double log_eps = std::log(prm.epsilon);
  const double L = product_limit(pq).value;

  LifespanUpperBound out;
  out.floor = std::max(prm.R, 2.0 * L);
  out.T_ub = std::numeric_limits<double>::infinity();
  const std::array<double, 4> F = {report.F1, report.F2, report.F3, report.F4};

  int slot = 0;
  for (InitMode mode : {InitMode::Prop1, InitMode::Prop2}) {
    IterationConfig cfg = config;
    cfg.init_mode = mode;
    const ExponentTuple first = start_exponents(cfg);
    const GrowthConstants g = growth_constants(cfg);
    const double eps_power_q = mode == InitMode::Prop1 ? 1.0 : q;

    for (bool via_U : {true, false}) {
      LifespanRoute& route = out.routes[slot];
      route.index = slot + 1;
      route.mode = mode;
      route.via_U = via_U;
      route.F = F[slot];
      route.active = route.F > 0.0;
      ++slot;

      // Bracket: log(E_1 ε^e) - (n+α_1) log(R+t) + (c + β_1) log(t-L), with
      // R+t <= 2t and t-L >= t/2 once t >= max{R, 2L}.
      const double shift = via_U ? (2.0 * p + 1.0) / (pq - 1.0) : (q + 2.0) / (pq - 1.0);
      const double decay = n + (via_U ? first.alpha : first.a);
      const double growth = shift + (via_U ? first.beta : first.b);
      route.t_exponent = growth - decay;
      const double log_E1 = via_U ? g.log_E1_eps - p * log_eps : g.log_E1_tilde_eps - eps_power_q * log_eps;
      const double two_power = decay + growth;
      if (!route.active || !(route.t_exponent > 0.0)) {
        route.E2 = std::numeric_limits<double>::quiet_NaN();
        route.bound = std::numeric_limits<double>::infinity();
        continue;
      }
      route.E2 = std::exp((two_power * std::log(2.0) - log_E1) / route.t_exponent);
      route.bound = std::max(out.floor, route.E2 * std::exp(-log_eps / route.F));
      if (route.bound < out.T_ub) {
        out.T_ub = route.bound;
        out.binding_F = route.index;
        out.exponent = 1.0 / route.F;
      }
    }
  }
  return out;
}

}  // namespace nakao
