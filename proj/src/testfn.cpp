#include "nakao/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nakao {

double sphere_measure(int k) {
  if (k < 1) throw std::invalid_argument("sphere_measure: k must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

double ball_volume(int k) { return sphere_measure(k) / k; }

namespace {

// P_N(x) and P_N'(x) by the three-term recurrence.
std::pair<double, double> legendre(int order, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= order; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = order * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussLegendreRule gauss_legendre(int order) {
  if (order < 2) throw std::invalid_argument("gauss_legendre: order must be >= 2");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussLegendreRule rule;
  rule.nodes = solver.eigenvalues().array();
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes(i);
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = legendre(order, x);
      x -= p / dp;
    }
    const auto [p, dp] = legendre(order, x);
    (void)p;
    rule.nodes(i) = x;
    rule.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

EigenfunctionEvaluator::EigenfunctionEvaluator(int n, int quadrature_order, double switch_radius)
    : n_(n), order_(quadrature_order), switch_radius_(switch_radius), prefactor_(0.0) {
  if (n < 1) throw std::invalid_argument("EigenfunctionEvaluator: n must be >= 1");
  if (quadrature_order < 2) throw std::invalid_argument("EigenfunctionEvaluator: order must be >= 2");
  if (!(switch_radius > 0.0)) throw std::invalid_argument("EigenfunctionEvaluator: switch radius must be > 0");
  if (n == 1) return;

  prefactor_ = sphere_measure(n - 1);
  auto build = [this](int order) {
    const auto rule = gauss_legendre(order);
    const double half_pi = 0.5 * std::numbers::pi;
    cos_theta_.resize(order);
    weights_.resize(order);
    for (int i = 0; i < order; ++i) {
      const double theta = half_pi * (rule.nodes(i) + 1.0);
      cos_theta_(i) = std::cos(theta);
      weights_(i) = half_pi * rule.weights(i) * std::pow(std::sin(theta), n_ - 2);
    }
  };

  for (int attempt = 0; attempt < 6; ++attempt) {
    build(2 * order_);
    const double fine = sphere_integral_scaled(switch_radius_);
    build(order_);
    const double coarse = sphere_integral_scaled(switch_radius_);
    if (std::abs(fine - coarse) <= 1e-13 * std::abs(fine)) break;
    order_ *= 2;
  }
  build(order_);
  asymptotic_constant_ = std::pow(switch_radius_, 0.5 * (n_ - 1)) * sphere_integral_scaled(switch_radius_);
}

double EigenfunctionEvaluator::sphere_integral_scaled(double r) const {
  return prefactor_ * (weights_ * (r * (cos_theta_ - 1.0)).exp()).sum();
}

double EigenfunctionEvaluator::phi_scaled(double r) const {
  r = std::abs(r);
  if (n_ == 1) return 1.0 + std::exp(-2.0 * r);
  if (r > switch_radius_) return asymptotic_constant_ * std::pow(r, -0.5 * (n_ - 1));
  return sphere_integral_scaled(r);
}

double EigenfunctionEvaluator::phi(double r) const { return std::exp(std::abs(r)) * phi_scaled(r); }

double EigenfunctionEvaluator::psi(double t, double r) const { return std::exp(std::abs(r) - t) * phi_scaled(r); }

namespace {

double radial_laplacian_fd(const EigenfunctionEvaluator& phi, double r, double h) {
  const int n = phi.dimension();
  const double center = phi.phi(r);
  if (r == 0.0) return n * 2.0 * (phi.phi(h) - center) / (h * h);
  const double plus = phi.phi(r + h), minus = phi.phi(r - h);
  const double second = (plus - 2.0 * center + minus) / (h * h);
  const double first = (plus - minus) / (2.0 * h);
  return second + (n - 1) / r * first;
}

}  // namespace

double laplacian_residual(const EigenfunctionEvaluator& phi, std::span<const double> r_grid, double h) {
  double worst = 0.0;
  for (double r : r_grid) {
    const double value = phi.phi(r);
    worst = std::max(worst, std::abs(radial_laplacian_fd(phi, r, h) - value) / value);
  }
  return worst;
}

double wave_residual(const EigenfunctionEvaluator& phi, std::span<const double> t_grid,
                     std::span<const double> r_grid, double h) {
  double worst = 0.0;
  for (double t : t_grid) {
    for (double r : r_grid) {
      const double center = phi.psi(t, r);
      const double psi_tt = (phi.psi(t + h, r) - 2.0 * center + phi.psi(t - h, r)) / (h * h);
      const double lap = std::exp(-t) * radial_laplacian_fd(phi, r, h);
      worst = std::max(worst, std::abs(psi_tt - lap) / center);
    }
  }
  return worst;
}

double psi_holder_norm(const EigenfunctionEvaluator& phi, double t, double p, double R) {
  if (!(p > 1.0)) throw std::invalid_argument("psi_holder_norm: p must be > 1");
  if (t < 0.0 || !(R > 0.0)) throw std::invalid_argument("psi_holder_norm: need t >= 0 and R > 0");
  static const GaussLegendreRule panel_rule = gauss_legendre(16);
  const int n = phi.dimension();
  const double conj = p / (p - 1.0);
  const double radius = R + t;
  const int panels = std::max(1, static_cast<int>(std::ceil(radius / 0.5)));
  const double width = radius / panels;

  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * width;
    for (Eigen::Index i = 0; i < panel_rule.nodes.size(); ++i) {
      const double r = a + 0.5 * width * (panel_rule.nodes(i) + 1.0);
      const double psi = phi.psi(t, r);
      total += 0.5 * width * panel_rule.weights(i) * std::pow(psi, conj) * std::pow(r, n - 1);
    }
  }
  return sphere_measure(n) * total;
}

double psi_holder_ratio(const EigenfunctionEvaluator& phi, double t, double p, double R) {
  const int n = phi.dimension();
  const double conj = p / (p - 1.0);
  return psi_holder_norm(phi, t, p, R) / std::pow(R + t, 0.5 * (n - 1) * (2.0 - conj));
}

double calibrate_holder_constant(const EigenfunctionEvaluator& phi, double p, double R, double t_max, double dt) {
  if (!(dt > 0.0) || t_max < 0.0) throw std::invalid_argument("calibrate_holder_constant: bad t grid");
  double worst = 0.0;
  const int steps = static_cast<int>(std::floor(t_max / dt + 1e-9));
  for (int k = 0; k <= steps; ++k) worst = std::max(worst, psi_holder_ratio(phi, k * dt, p, R));
  return worst;
}

}  // namespace nakao
