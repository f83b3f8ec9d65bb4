#include "nakao/lifespan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "nakao/exponents.hpp"

namespace nakao {

PowerLawFit fit_powerlaw(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_powerlaw: size mismatch");
  const auto count = static_cast<Eigen::Index>(xs.size());
  if (count < 4) throw std::invalid_argument("fit_powerlaw: need at least 4 points");
  Eigen::MatrixXd design(count, 2);
  Eigen::VectorXd rhs(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("fit_powerlaw: inputs must be positive");
    design(i, 0) = 1.0;
    design(i, 1) = std::log(xs[i]);
    rhs(i) = std::log(ys[i]);
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  const double ssr = (design * coef - rhs).squaredNorm();
  const double mean = design.col(1).mean();
  const double sxx = (design.col(1).array() - mean).square().sum();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_powerlaw: xs must not all coincide");

  PowerLawFit fit;
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.stderr_slope = std::sqrt(ssr / static_cast<double>(count - 2) / sxx);
  return fit;
}

LifespanFit sweep(const ProblemParams& params, std::span<const double> ladder, const Numerics& numerics,
                  const InitialDataSpec& spec, const SweepOptions& options) {
  validate(params);
  if (ladder.empty()) throw std::invalid_argument("sweep: empty epsilon ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw std::invalid_argument("sweep: epsilons must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw std::invalid_argument("sweep: ladder must be strictly decreasing");
  }
  const ExponentReport report = critical_values(params);
  if (report.verdict != Verdict::BlowUpTheorem23)
    throw std::domain_error(fmt::format("sweep: verdict is {}, no lifespan exponent", to_string(report.verdict)));

  LifespanFit out;
  out.tol = options.tol;
  out.predicted_slope = 1.0 / report.F;
  out.points.resize(ladder.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ladder.size(); i = next++) {
      ProblemParams local = params;
      local.epsilon = ladder[i];
      Numerics num = numerics;
      num.refine = options.refine_check;
      const FunctionalTrace trace = run(local, spec, num);
      SweepPoint& point = out.points[i];
      point.epsilon = ladder[i];
      point.T_blowup = trace.T_blowup;
      point.T_refined = trace.T_blowup_refined;
      if (options.refine_check) {
        point.refinement_ok = point.T_blowup && point.T_refined &&
                              std::abs(*point.T_blowup - *point.T_refined) < options.refine_tol * *point.T_refined;
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp<long>(options.jobs, 1, static_cast<long>(ladder.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<double> inverse;
  for (const SweepPoint& point : out.points) {
    if (!point.T_blowup) {
      out.missing.push_back(point.epsilon);
      continue;
    }
    out.refinement_ok = out.refinement_ok && point.refinement_ok;
    out.epsilons.push_back(point.epsilon);
    out.T_values.push_back(*point.T_blowup);
    inverse.push_back(1.0 / point.epsilon);
  }

  if (out.epsilons.size() < 4) {
    out.inconclusive = true;
    out.note = fmt::format("only {} of {} ladder points blew up before t_max", out.epsilons.size(), ladder.size());
    return out;
  }
  const PowerLawFit fit = fit_powerlaw(inverse, out.T_values);
  out.fitted = true;
  out.fitted_slope = fit.slope;
  out.slope_stderr = fit.stderr_slope;
  out.consistent = out.fitted_slope <= out.predicted_slope * (1.0 + out.tol);
  if (!out.missing.empty()) {
    out.inconclusive = true;
    out.note = fmt::format("{} ladder point(s) reached t_max without blow-up", out.missing.size());
  } else if (!out.refinement_ok) {
    out.inconclusive = true;
    out.note = "blow-up times moved by more than the refinement tolerance under h/2";
  }
  return out;
}

}  // namespace nakao
