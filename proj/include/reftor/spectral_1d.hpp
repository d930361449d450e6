#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "reftor/linalg.hpp"
#include "reftor/zeta.hpp"

namespace reftor {

/// Rank-1 flat bundle over a circle of circumference L with holonomy
/// lambda = r e^{i theta}, theta in [0, 2 pi). The first-order operator has
/// eigenvalues (2 pi n + w) / L, w = theta - i log r.
struct CircleModel {
  double length = 1.0;
  Complex holonomy{-1.0, 0.0};
  int rank = 1;

  /// StructuralError for L <= 0, lambda = 0 or rank != 1.
  void validate() const;
  double theta() const;
  double modulus() const { return std::abs(holonomy); }
  Complex frequency() const;
  /// |lambda - 1| > 1e-14.
  bool acyclic() const;
};

enum class BoundaryCondition { relative, absolute };

/// Interval [0, L]; relative means Dirichlet on functions, absolute Neumann.
struct IntervalModel {
  double length = 1.0;
  BoundaryCondition condition = BoundaryCondition::relative;
};

/// mu_n = ((2 pi n + w) / L)^2, n = -cutoff..cutoff (DomainError if cutoff < 1).
std::vector<Complex> circle_laplace_spectrum(const CircleModel& m, int cutoff);

/// Hurwitz parameters of the two families of the first-order spectrum:
/// n >= 0 gives (2 pi / L)(n + a_plus), n < 0 gives -(2 pi / L)(n' + a_minus),
/// a_plus = w / 2 pi, a_minus = 1 - a_plus. At lambda = 1 the zero mode is
/// dropped and both parameters are 1. DomainError for lambda on the positive
/// real axis away from 1 (the families are not separated by Re).
struct CircleFamilies {
  Complex a_plus, a_minus;
  double scale = 0.0;  // 2 pi / L
  int zero_modes = 0;
};

CircleFamilies circle_families(const CircleModel& m);

struct LaplaceDeterminant {
  /// exp(-zeta'(0)) over the nonzero spectrum.
  Complex value;
  Complex zeta_at_zero;
  Complex zeta_prime_at_zero;
  int zero_modes = 0;
};

/// zeta(s) = (2 pi / L)^{-2s} (zeta_H(2s, a_plus) + zeta_H(2s, a_minus)), i.e.
/// mu_n^{-s} read as (n + a)^{-2s} with principal logarithms. Equals
/// 4 sin^2(w / 2) for lambda != 1 and L^2 at lambda = 1 (one zero mode).
LaplaceDeterminant zeta_det_laplacian_circle(const CircleModel& m, const ZetaEvaluator& z = {});

/// eta(0) = zeta_H(0, a_plus) - zeta_H(0, a_minus) = 1 - w / pi; 0 at lambda = 1
/// (symmetric spectrum once the zero mode is dropped).
Complex eta_circle(const CircleModel& m, const ZetaEvaluator& z = {});

struct CircleGradedDeterminant {
  Complex value;
  /// xi = -(1/2) zeta'_Delta(0) and xi' = -(1/2) zeta_Delta(0) from the
  /// 1-form Laplacian, eta from eta_circle.
  Complex xi, xi_prime, eta;
};

/// exp(xi - i pi xi' - i pi eta / 2): eta enters with the half weight of the
/// finite model, which gives Det_gr = 1 - lambda. theta_agmon in (-pi, 0) must
/// separate the two families (AgmonError otherwise); DomainError at lambda = 1.
CircleGradedDeterminant graded_det_circle(const CircleModel& m, double theta_agmon = -std::numbers::pi / 2,
                                          const ZetaEvaluator& z = {});

struct IntervalDeterminant {
  double value = 0.0;
  int zero_modes = 0;
};

/// Spectrum (pi n / L)^2, n >= 1, through zeta_R; det' = 2L for both
/// conditions, plus one zero mode for the absolute one.
IntervalDeterminant interval_det(const IntervalModel& i, const ZetaEvaluator& z = {});

struct LeschCheck {
  /// log of |Phi(x_1 (x) x_2)|_RS / (|x_1|_RS |x_2|_RS).
  double log_ratio = 0.0;
  /// (1/2) chi(N) log 2 with chi(N) = 2.
  double expected = 0.0;
  double residual = 0.0;
  /// |Phi| on the chosen cohomology bases, from the combinatorial LES.
  double phi_modulus = 0.0;
};

/// Trivial rank-1 circle of circumference L1 + L2 cut at two points into
/// M1 (length L1, relative conditions) and M2 (length L2, absolute). Norms:
/// Ray-Singer norm = L^2 norm * prod_q det'(Delta_q)^{(-1)^q q / 2}; a
/// constant 0-class v has L^2 norm |v| sqrt(L) and a 1-class of integral I
/// has harmonic norm |I| / sqrt(L).
LeschCheck gluing_check_lesch(double l1, double l2, const ZetaEvaluator& z = {});

/// 2^{chi_N} exp(i pi (eta_M - eta_M1 - eta_M2)); the overall sign is not
/// determined.
Complex gluing_constant_K(Complex eta_m, Complex eta_m1, Complex eta_m2, int chi_n);

/// cr_residual of z -> exp(2 pi i eta(lambda(z))) at z0 with step h.
/// DomainError if a stencil point has lambda = 1 or lambda on the positive
/// real axis.
double K_squared_holomorphy(const std::function<Complex(Complex)>& lambda, Complex z0, double h = 1e-4,
                            const ZetaEvaluator& z = {});

struct CircleAnalyticTorsion {
  Complex value;
  Complex graded_determinant;
  /// Trivial-bundle quantities, zero mode removed.
  double eta_trivial = 0.0;
  double xi_hat = 0.0;
};

/// rho_an = Det_gr(M) exp(i pi (eta(B_trivial) + xi_hat)), xi_hat =
/// (1/2) sum_k (-1)^k k zeta(0, Delta_k trivial) = 1/2.
CircleAnalyticTorsion rat_circle(const CircleModel& m, double theta_agmon = -std::numbers::pi / 2,
                                 const ZetaEvaluator& z = {});

}  // namespace reftor
