#pragma once

// The positive eigenfunction Φ of the Laplacian (ΔΦ = Φ),
//
//   Φ(x) = e^x + e^{-x}                      n = 1,
//   Φ(x) = ∫_{S^{n-1}} e^{x·ω} dσ_ω          n >= 2,
//
// and the free-wave solution Ψ(t,x) = e^{-t} Φ(x). For radial arguments the
// sphere integral reduces to |S^{n-2}| ∫_0^π e^{r cos θ} sin^{n-2} θ dθ.

#include <span>

#include <Eigen/Core>

namespace nakao {

/// |S^{k-1}|, the surface measure of the unit sphere in R^k (k >= 1; |S^0| = 2).
double sphere_measure(int k);

/// |B_1| in R^k.
double ball_volume(int k);

struct GaussLegendreRule {
  Eigen::ArrayXd nodes;    // on [-1, 1], ascending
  Eigen::ArrayXd weights;
};

/// Gauss–Legendre rule of the given order (Golub–Welsch, Newton-polished nodes).
GaussLegendreRule gauss_legendre(int order);

class EigenfunctionEvaluator {
 public:
  /// The quadrature order is doubled until it agrees with the doubled order to
  /// 1e-13 relative at the switch radius. Beyond `switch_radius` the asymptotic
  /// form K r^{-(n-1)/2} e^r is used, with K matched at the switch radius.
  explicit EigenfunctionEvaluator(int n, int quadrature_order = 64, double switch_radius = 200.0);

  int dimension() const { return n_; }
  int quadrature_order() const { return order_; }
  double switch_radius() const { return switch_radius_; }

  /// e^{-r} Φ(r); never overflows.
  double phi_scaled(double r) const;
  double phi(double r) const;
  /// Ψ(t, r) = e^{-t} Φ(r).
  double psi(double t, double r) const;

 private:
  double sphere_integral_scaled(double r) const;

  int n_;
  int order_;
  double switch_radius_;
  double prefactor_;  // |S^{n-2}|
  double asymptotic_constant_ = 0.0;
  // Polar-angle nodes on [0, π]; weights already carry sin^{n-2}θ and the π/2 Jacobian.
  Eigen::ArrayXd cos_theta_;
  Eigen::ArrayXd weights_;
};

/// Max over the grid of |Φ'' + (n-1)/r Φ' - Φ| / Φ, derivatives by central
/// differences with step h; r = 0 uses the regularized n·Φ''(0).
double laplacian_residual(const EigenfunctionEvaluator& phi, std::span<const double> r_grid, double h);

/// Max over the (t, r) grid of |Ψ_tt - ΔΨ| / Ψ with central differences of step h in t and r.
double wave_residual(const EigenfunctionEvaluator& phi, std::span<const double> t_grid,
                     std::span<const double> r_grid, double h);

/// ∫_{|x| <= R+t} |Ψ(t,x)|^{p'} dx with p' = p/(p-1), by composite Gauss–Legendre in r.
double psi_holder_norm(const EigenfunctionEvaluator& phi, double t, double p, double R);

/// psi_holder_norm divided by (R+t)^{(n-1)(2-p')/2}.
double psi_holder_ratio(const EigenfunctionEvaluator& phi, double t, double p, double R);

/// max of psi_holder_ratio over t = 0, dt, ..., t_max: the constant C_2(n, R).
double calibrate_holder_constant(const EigenfunctionEvaluator& phi, double p, double R, double t_max = 50.0,
                                 double dt = 0.5);

}  // namespace nakao
