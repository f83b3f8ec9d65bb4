#pragma once

// ε-sweeps of the simulator and a power-law fit T ~ C ε^{-s}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nakao/params.hpp"
#include "nakao/pde.hpp"

namespace nakao {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log C
  double stderr_slope = 0.0;
};

/// OLS of log y against log x. Needs >= 4 points, all positive.
PowerLawFit fit_powerlaw(std::span<const double> xs, std::span<const double> ys);

struct SweepOptions {
  double tol = 0.35;
  /// Repeat every point at h/2 and require |T(h) - T(h/2)| < refine_tol T(h/2).
  bool refine_check = false;
  double refine_tol = 0.10;
  int jobs = 1;
};

struct SweepPoint {
  double epsilon = 0.0;
  std::optional<double> T_blowup;
  std::optional<double> T_refined;
  bool refinement_ok = true;
};

struct LifespanFit {
  std::vector<double> epsilons;  // points that entered the fit
  std::vector<double> T_values;
  std::vector<SweepPoint> points;  // every ladder point, in ladder order
  std::vector<double> missing;     // ladder points without detected blow-up
  double fitted_slope = 0.0;       // slope of log T against log(1/ε)
  double slope_stderr = 0.0;
  double predicted_slope = 0.0;    // 1/F
  double tol = 0.35;
  bool fitted = false;
  bool consistent = false;
  bool refinement_ok = true;
  bool inconclusive = false;
  std::string note;
};

/// Runs the ladder (strictly decreasing, positive) and fits the surviving points.
/// Throws std::invalid_argument on a bad ladder and std::domain_error unless
/// the exponent verdict is BlowUpTheorem23.
LifespanFit sweep(const ProblemParams& params, std::span<const double> ladder, const Numerics& numerics,
                  const InitialDataSpec& spec = {}, const SweepOptions& options = {});

}  // namespace nakao
