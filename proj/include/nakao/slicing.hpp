#pragma once

// Iteration argument with slicing for the lower bounds
//
//   U(t) >= D_j (R+t)^{-α_j} (t - L_j)^{β_j},   V(t) >= Q_j (R+t)^{-a_j} (t - L_j)^{b_j},
//
// where L_j is the j-th partial product of ℓ_k = 1 + (pq)^{(1-k)/2}.
// D_j and Q_j grow double-exponentially in j, so they are carried as logs.

#include <array>
#include <string_view>
#include <vector>

#include "nakao/params.hpp"

namespace nakao {

enum class InitMode { Prop1, Prop2 };
enum class ConstantMode { UnitConstants, ExplicitConstants };

std::string_view to_string(InitMode mode);
std::string_view to_string(ConstantMode mode);

/// Data-dependent constants that the argument only asserts to exist. In
/// ExplicitConstants mode they are supplied from measurements of the initial
/// data (e.g. the simulator's functionals at t = 0).
struct MeasuredConstants {
  double c1 = 1.0;        // V_1(t) >= c1 ε
  double c4 = 1.0;        // V(t) >= c4 ε t
  double c0_tilde = 1.0;  // U(t) >= c0_tilde ε
  double c1_tilde = 1.0;  // V(t) >= c1_tilde ε t
  double holder_t_max = 50.0;  // t-range for calibrating C_2
};

struct IterationConfig {
  InitMode init_mode = InitMode::Prop1;
  ConstantMode constant_mode = ConstantMode::UnitConstants;
  ProblemParams params;
  MeasuredConstants measured;
};

/// Logs of the frame constants: C_0 (both frames), C_2, C_3 (Prop1 start),
/// C̃_2, C̃_3 (Prop2 start). All zero in UnitConstants mode.
struct FrameConstants {
  double log_c0 = 0.0;
  double log_c2 = 0.0;
  double log_c3 = 0.0;
  double log_c2_tilde = 0.0;
  double log_c3_tilde = 0.0;
};

FrameConstants frame_constants(const IterationConfig& config);

struct SlicingState {
  int j = 1;
  double ell = 2.0;  // ℓ_j
  double L = 2.0;    // L_j
  double alpha = 0.0, a = 0.0, beta = 0.0, b = 0.0;
  double logD = 0.0, logQ = 0.0;
};

/// ℓ_k = 1 + (pq)^{(1-k)/2}.
double slice_factor(int k, double pq);
/// L_j = ℓ_1 ⋯ ℓ_j.
double partial_product(int j, double pq);

struct ProductLimit {
  double value = 0.0;      // L
  double log_value = 0.0;  // log L
  int terms = 0;
  double log_error_bound = 0.0;  // certified bound on |log L - log_value|
};

/// L = lim L_j, accumulating log ℓ_k until the geometric tail bound drops below tol.
ProductLimit product_limit(double pq, double tol = 1e-14);

/// State at j = 1 for the configured start. Throws std::invalid_argument for
/// inadmissible parameters.
SlicingState initial_bounds(const IterationConfig& config);

/// One application of the recursive relations (all multiplicative constants in log space).
SlicingState step(const SlicingState& state, const IterationConfig& config);

/// States j = 1..jmax.
std::vector<SlicingState> iterate(const IterationConfig& config, int jmax);

struct ExponentTuple {
  double alpha = 0.0, a = 0.0, beta = 0.0, b = 0.0;
};

/// Closed forms for odd j, with the start exponents left general. Throws on even j.
ExponentTuple closed_form_exponents(int j, const IterationConfig& config);

/// Closed forms of β_j, b_j for even j. Throws on odd j.
std::array<double, 2> even_beta_b(int j, const IterationConfig& config);

struct SumIdentity {
  double lhs = 0.0;  // Σ_{k=1}^{(j-1)/2} (j+2-2k)(pq)^{k-1}, summed directly
  double rhs = 0.0;  // closed form
};

/// Requires odd j >= 3 (j = 1 returns the empty sum 0 on both sides).
SumIdentity weighted_sum_identity(int j, double pq);

struct GrowthConstants {
  double B0 = 0.0, B0_tilde = 0.0;          // used: closed-form leading coefficients
  double B0_sup = 0.0, B0_tilde_sup = 0.0;  // sup over j <= jsup of β_j/(pq)^{⌊j/2⌋}
  double M = 0.0;                            // exp(-B0 (pq)^{1/2})
  double log_E0 = 0.0, log_E0_tilde = 0.0;
  /// log(E_1 ε^{p}) and log(Ẽ_1 ε^{e}) with e = 1 (Prop1) or q (Prop2).
  double log_E1_eps = 0.0, log_E1_tilde_eps = 0.0;
};

GrowthConstants growth_constants(const IterationConfig& config, int jsup = 60);

struct Thresholds {
  double j0_raw = 0.0, j1_raw = 0.0;
  int j0 = 1, j1 = 1;  // rounded up to odd integers >= 1
};

Thresholds thresholds(const IterationConfig& config);

struct LogLowerBounds {
  double logD_lower = 0.0;
  double logQ_lower = 0.0;
};

/// (pq)^{(j-1)/2} log(E_1 ε^p) and (pq)^{(j-1)/2} log(Ẽ_1 ε^e) for odd j.
LogLowerBounds log_lower_bounds(int j, const IterationConfig& config);

/// log of the lower bound for U(t) (resp. V(t)) after j slicing steps, using the
/// log D_j bound, the closed-form exponents and (t - L) in place of (t - L_j).
/// Requires odd j and t > L.
double log_u_lower(int j, double t, const IterationConfig& config);
double log_v_lower(int j, double t, const IterationConfig& config);

struct LifespanRoute {
  int index = 0;           // i in F_i
  InitMode mode = InitMode::Prop1;
  bool via_U = true;       // D-sequence (U) or Q-sequence (V)
  double F = 0.0;
  bool active = false;     // F_i > 0
  double t_exponent = 0.0; // exponent of t inside the iterated bracket: p F_i or q F_i
  double E2 = 0.0;         // prefactor of ε^{-1/F_i}
  double bound = 0.0;      // max{R, 2L, E2 ε^{-1/F_i}}
};

struct LifespanUpperBound {
  double T_ub = 0.0;
  int binding_F = 0;
  double exponent = 0.0;  // 1/F_binding
  double floor = 0.0;     // max{R, 2L}
  std::array<LifespanRoute, 4> routes;
};

/// Combines the four routes (F_1, F_2 from the Prop1 start, F_3, F_4 from the
/// Prop2 start) and keeps the smallest bound. The config's init_mode is ignored.
/// Throws std::domain_error unless the verdict is BlowUpTheorem23.
LifespanUpperBound lifespan_upper_bound(const IterationConfig& config);

}  // namespace nakao
