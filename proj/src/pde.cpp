#include "nakao/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nakao/testfn.hpp"

namespace nakao {

std::string_view to_string(DataShape shape) { return shape == DataShape::Bump ? "bump" : "cosine"; }

std::string_view to_string(BlowupReason reason) {
  switch (reason) {
    case BlowupReason::None: return "None";
    case BlowupReason::MaxNormThreshold: return "MaxNormThreshold";
    case BlowupReason::FunctionalThreshold: return "FunctionalThreshold";
  }
  return "None";
}

double data_profile(DataShape shape, double r, double R) {
  const double s = std::abs(r) / R;
  if (s >= 1.0) return 0.0;
  if (shape == DataShape::Bump) {
    const double w = 1.0 - s * s;
    return (w * w) * (w * w);
  }
  const double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c;
}

RadialGrid make_grid(int n, double h, double r_max) {
  if (n < 1) throw std::invalid_argument("make_grid: n must be >= 1");
  if (!(h > 0.0) || !(r_max > h)) throw std::invalid_argument("make_grid: need 0 < h < r_max");
  RadialGrid g;
  g.n = n;
  g.h = h;
  const int cells = static_cast<int>(std::ceil(r_max / h - 1e-9));
  g.r_max = cells * h;
  if (n == 1) {
    const int nodes = 2 * cells + 1;
    g.x.resize(nodes);
    for (int i = 0; i < nodes; ++i) g.x(i) = (i - cells) * h;
    g.weight = Eigen::ArrayXd::Constant(nodes, h);
  } else {
    const int nodes = cells + 1;
    g.x.resize(nodes);
    for (int i = 0; i < nodes; ++i) g.x(i) = i * h;
    g.weight = sphere_measure(n) * g.x.pow(n - 1) * h;
  }
  g.weight(0) *= 0.5;
  g.weight(g.weight.size() - 1) *= 0.5;
  return g;
}

void radial_laplacian(const RadialGrid& grid, const Eigen::ArrayXd& u, Eigen::ArrayXd& out) {
  const Eigen::Index m = u.size();
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  out.resize(m);
  out(0) = 0.0;
  out(m - 1) = 0.0;
  const Eigen::Index inner = m - 2;
  out.segment(1, inner) = (u.segment(2, inner) - 2.0 * u.segment(1, inner) + u.segment(0, inner)) * inv_h2;
  if (grid.n == 1) return;
  const double inv_2h = 0.5 / grid.h;
  out.segment(1, inner) +=
      (grid.n - 1) / grid.x.segment(1, inner) * (u.segment(2, inner) - u.segment(0, inner)) * inv_2h;
  // Ghost node u_{-1} = u_1 and Δu(0) = n u_rr(0).
  out(0) = grid.n * 2.0 * (u(1) - u(0)) * inv_h2;
}

namespace {

Eigen::ArrayXd power_abs(const Eigen::ArrayXd& w, double exponent) {
  if (exponent == 2.0) return w.square();
  return w.abs().pow(exponent);
}

void check_numerics(const Numerics& numerics, const ProblemParams& params) {
  if (!(numerics.h > 0.0)) throw std::invalid_argument("grid spacing h must be > 0");
  if (!(numerics.cfl > 0.0 && numerics.cfl < 1.0)) throw std::invalid_argument("CFL violation: need 0 < cfl < 1");
  if (!(numerics.t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
  if (!(numerics.threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  if (numerics.r_max > 0.0 && numerics.r_max < params.R + numerics.t_max + numerics.h)
    throw std::invalid_argument("domain too small: r_max must be >= R + t_max + h");
}

double resolved_r_max(const Numerics& numerics, const ProblemParams& params) {
  return numerics.r_max > 0.0 ? numerics.r_max : params.R + numerics.t_max + 1.0;
}

}  // namespace

RadialField make_initial_data(const InitialDataSpec& spec, const ProblemParams& params, const Numerics& numerics,
                              const SchemeOptions& options) {
  validate(params);
  check_numerics(numerics, params);
  if (spec.u0 < 0.0 || spec.u1 < 0.0 || spec.v0 < 0.0 || spec.v1 < 0.0)
    throw std::invalid_argument("initial amplitudes must be nonnegative");

  RadialField f;
  f.grid = make_grid(params.n, numerics.h, resolved_r_max(numerics, params));
  f.dt = numerics.cfl * numerics.h;
  f.t = 0.0;

  const Eigen::Index m = f.grid.x.size();
  Eigen::ArrayXd shape(m);
  for (Eigen::Index i = 0; i < m; ++i) shape(i) = data_profile(spec.shape, f.grid.x(i), params.R);
  shape(m - 1) = 0.0;
  if (params.n == 1) shape(0) = 0.0;

  const double eps = params.epsilon;
  f.u_now = eps * spec.u0 * shape;
  f.v_now = eps * spec.v0 * shape;
  const Eigen::ArrayXd u1 = eps * spec.u1 * shape;
  const Eigen::ArrayXd v1 = eps * spec.v1 * shape;
  f.u_rate0 = (f.grid.weight * u1).sum();
  f.v_rate0 = (f.grid.weight * v1).sum();

  Eigen::ArrayXd lap_u, lap_v;
  radial_laplacian(f.grid, f.u_now, lap_u);
  radial_laplacian(f.grid, f.v_now, lap_v);
  Eigen::ArrayXd src_u = Eigen::ArrayXd::Zero(m), src_v = Eigen::ArrayXd::Zero(m);
  if (options.nonlinear) {
    src_u = power_abs(f.v_now, params.p);
    src_v = power_abs(f.u_now, params.q);
  }
  if (options.forcing) {
    Eigen::ArrayXd fu = Eigen::ArrayXd::Zero(m), fv = Eigen::ArrayXd::Zero(m);
    options.forcing(0.0, f.grid.x, fu, fv);
    src_u += fu;
    src_v += fv;
  }
  const double dt = f.dt;
  const Eigen::ArrayXd u_tt = lap_u - u1 + src_u;
  const Eigen::ArrayXd v_tt = lap_v + src_v;
  f.u_prev = f.u_now - dt * u1 + 0.5 * dt * dt * u_tt;
  f.v_prev = f.v_now - dt * v1 + 0.5 * dt * dt * v_tt;
  f.u_prev(m - 1) = 0.0;
  f.v_prev(m - 1) = 0.0;
  if (params.n == 1) {
    f.u_prev(0) = 0.0;
    f.v_prev(0) = 0.0;
  }
  return f;
}

StepStatus step(RadialField& f, const ProblemParams& params, double threshold, const SchemeOptions& options) {
  const Eigen::Index m = f.u_now.size();
  const double dt = f.dt, dt2 = dt * dt;

  Eigen::ArrayXd lap_u, lap_v;
  radial_laplacian(f.grid, f.u_now, lap_u);
  radial_laplacian(f.grid, f.v_now, lap_v);
  Eigen::ArrayXd rhs_u = lap_u, rhs_v = lap_v;
  if (options.nonlinear) {
    rhs_u += power_abs(f.v_now, params.p);
    rhs_v += power_abs(f.u_now, params.q);
  }
  if (options.forcing) {
    Eigen::ArrayXd fu = Eigen::ArrayXd::Zero(m), fv = Eigen::ArrayXd::Zero(m);
    options.forcing(f.t, f.grid.x, fu, fv);
    rhs_u += fu;
    rhs_v += fv;
  }

  Eigen::ArrayXd u_next = (2.0 * f.u_now - f.u_prev + dt2 * rhs_u + 0.5 * dt * f.u_prev) / (1.0 + 0.5 * dt);
  Eigen::ArrayXd v_next = 2.0 * f.v_now - f.v_prev + dt2 * rhs_v;
  u_next(m - 1) = 0.0;
  v_next(m - 1) = 0.0;
  if (params.n == 1) {
    u_next(0) = 0.0;
    v_next(0) = 0.0;
  }

  f.u_prev = std::move(f.u_now);
  f.v_prev = std::move(f.v_now);
  f.u_now = std::move(u_next);
  f.v_now = std::move(v_next);
  f.t += dt;

  const double size = f.u_now.abs().maxCoeff() + f.v_now.abs().maxCoeff();
  if (!std::isfinite(size) || size > threshold) return StepStatus::Blowup;
  return StepStatus::Ok;
}

Functionals functionals(const RadialField& f, const Eigen::ArrayXd& phi_scaled) {
  Functionals out;
  out.U = (f.grid.weight * f.u_now).sum();
  out.V = (f.grid.weight * f.v_now).sum();
  const Eigen::ArrayXd psi = (f.grid.x.abs() - f.t).exp() * phi_scaled;
  out.V1 = (f.grid.weight * f.v_now * psi).sum();
  return out;
}

double linear_energy(const RadialField& f) {
  const Eigen::Index m = f.u_now.size();
  const double h = f.grid.h;
  const Eigen::ArrayXd rate = (f.u_now - f.u_prev) / f.dt;
  const Eigen::ArrayXd grad_now = (f.u_now.tail(m - 1) - f.u_now.head(m - 1)) / h;
  const Eigen::ArrayXd grad_prev = (f.u_prev.tail(m - 1) - f.u_prev.head(m - 1)) / h;
  Eigen::ArrayXd mid_weight;
  if (f.grid.n == 1) {
    mid_weight = Eigen::ArrayXd::Constant(m - 1, h);
  } else {
    const Eigen::ArrayXd mid = 0.5 * (f.grid.x.tail(m - 1) + f.grid.x.head(m - 1));
    mid_weight = sphere_measure(f.grid.n) * mid.pow(f.grid.n - 1) * h;
  }
  return 0.5 * ((f.grid.weight * rate.square()).sum() + (mid_weight * grad_now * grad_prev).sum());
}

namespace {

double support_radius(const RadialGrid& grid, const Eigen::ArrayXd& w, double rel_tol) {
  const double peak = w.abs().maxCoeff();
  if (peak == 0.0) return 0.0;
  const double cut = rel_tol * peak;
  double radius = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > cut) radius = std::max(radius, std::abs(grid.x(i)));
  }
  return radius;
}

void record(FunctionalTrace& trace, const RadialField& f, const ProblemParams& params, const Eigen::ArrayXd& phi_s,
            double support_tol) {
  const Functionals fn = functionals(f, phi_s);
  trace.times.push_back(f.t);
  trace.U.push_back(fn.U);
  trace.V.push_back(fn.V);
  trace.V1.push_back(fn.V1);
  trace.maxu.push_back(f.u_now.abs().maxCoeff());
  trace.maxv.push_back(f.v_now.abs().maxCoeff());
  trace.source_u.push_back((f.grid.weight * power_abs(f.v_now, params.p)).sum());
  trace.source_v.push_back((f.grid.weight * power_abs(f.u_now, params.q)).sum());
  trace.support_u.push_back(support_radius(f.grid, f.u_now, support_tol));
  trace.support_v.push_back(support_radius(f.grid, f.v_now, support_tol));
}

FunctionalTrace run_once(const ProblemParams& params, const InitialDataSpec& spec, const Numerics& numerics,
                         const SchemeOptions& options) {
  RadialField f = make_initial_data(spec, params, numerics, options);
  const EigenfunctionEvaluator phi(params.n);
  Eigen::ArrayXd phi_s(f.grid.x.size());
  for (Eigen::Index i = 0; i < phi_s.size(); ++i) phi_s(i) = phi.phi_scaled(f.grid.x(i));

  FunctionalTrace trace;
  trace.h = f.grid.h;
  trace.dt = f.dt;
  trace.r_max = f.grid.r_max;
  trace.u_rate0 = f.u_rate0;
  trace.v_rate0 = f.v_rate0;
  record(trace, f, params, phi_s, numerics.support_tol);

  const long steps = std::lround(std::ceil(numerics.t_max / f.dt - 1e-9));
  const double log_threshold = std::log(numerics.threshold);
  for (long k = 0; k < steps; ++k) {
    const double before = trace.maxu.back() + trace.maxv.back();
    const StepStatus status = step(f, params, numerics.threshold, options);
    if (status == StepStatus::Blowup) {
      const double after = f.u_now.abs().maxCoeff() + f.v_now.abs().maxCoeff();
      double t_cross = f.t;
      if (std::isfinite(after) && before > 0.0 && after > before) {
        const double frac = (log_threshold - std::log(before)) / (std::log(after) - std::log(before));
        t_cross = f.t - f.dt + f.dt * std::clamp(frac, 0.0, 1.0);
        record(trace, f, params, phi_s, numerics.support_tol);
      }
      trace.T_blowup = t_cross;
      trace.blowup_reason = BlowupReason::MaxNormThreshold;
      break;
    }
    record(trace, f, params, phi_s, numerics.support_tol);
    if (std::max(std::abs(trace.U.back()), std::abs(trace.V.back())) > numerics.threshold) {
      trace.T_blowup = f.t;
      trace.blowup_reason = BlowupReason::FunctionalThreshold;
      break;
    }
  }
  balance_residuals(trace);
  return trace;
}

}  // namespace

void balance_residuals(FunctionalTrace& trace) {
  const std::size_t count = trace.times.size();
  trace.res_u.assign(count, 0.0);
  trace.res_v.assign(count, 0.0);
  trace.balance_u = trace.balance_v = 0.0;
  if (count < 3) return;
  const double dt = trace.times[1] - trace.times[0];

  auto derivative = [&](const std::vector<double>& y, std::size_t k) {
    if (k == count - 1) return (3.0 * y[k] - 4.0 * y[k - 1] + y[k - 2]) / (2.0 * dt);
    return (y[k + 1] - y[k - 1]) / (2.0 * dt);
  };

  const double base_u = trace.u_rate0 + trace.U[0];
  double cum_u = 0.0, cum_v = 0.0;
  double scale_u = std::abs(base_u), scale_v = std::abs(trace.v_rate0);
  double worst_u = 0.0, worst_v = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double step_dt = trace.times[k] - trace.times[k - 1];
    cum_u += 0.5 * step_dt * (trace.source_u[k] + trace.source_u[k - 1]);
    cum_v += 0.5 * step_dt * (trace.source_v[k] + trace.source_v[k - 1]);
    trace.res_u[k] = derivative(trace.U, k) + trace.U[k] - base_u - cum_u;
    trace.res_v[k] = derivative(trace.V, k) - trace.v_rate0 - cum_v;
    scale_u = std::max(scale_u, std::abs(base_u) + cum_u);
    scale_v = std::max(scale_v, std::abs(trace.v_rate0) + cum_v);
    worst_u = std::max(worst_u, std::abs(trace.res_u[k]));
    worst_v = std::max(worst_v, std::abs(trace.res_v[k]));
  }
  trace.balance_u = scale_u > 0.0 ? worst_u / scale_u : 0.0;
  trace.balance_v = scale_v > 0.0 ? worst_v / scale_v : 0.0;
}

FunctionalTrace run(const ProblemParams& params, const InitialDataSpec& spec, const Numerics& numerics,
                    const SchemeOptions& options) {
  FunctionalTrace trace = run_once(params, spec, numerics, options);
  if (numerics.refine) {
    Numerics fine = numerics;
    fine.h = 0.5 * numerics.h;
    fine.refine = false;
    if (fine.r_max <= 0.0) fine.r_max = trace.r_max;
    trace.T_blowup_refined = run_once(params, spec, fine, options).T_blowup;
  }
  return trace;
}

}  // namespace nakao
