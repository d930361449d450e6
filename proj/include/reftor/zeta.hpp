#pragma once

#include "reftor/linalg.hpp"

namespace reftor {

/// Value and s-derivative of a zeta function at one point.
struct ZetaValue {
  Complex value;
  Complex derivative;
};

/// Hurwitz zeta zeta_H(s, a) = sum_{n >= 0} (n + a)^{-s} for complex s != 1
/// and complex a with Re a > 0, continued by Euler-Maclaurin summation:
/// `direct_terms` explicit terms, then Bernoulli corrections up to B_{2K},
/// K = `bernoulli_order`. Powers use the principal logarithm of n + a.
class ZetaEvaluator {
 public:
  int direct_terms = 16;
  int bernoulli_order = 10;

  /// zeta_H(s, a) and d/ds zeta_H(s, a). DomainError for Re a <= 0 or s = 1.
  ZetaValue hurwitz(Complex s, Complex a) const;

  /// The same evaluator doubled in both parameters (cutoff-stability checks).
  ZetaEvaluator refined() const { return ZetaEvaluator{2 * direct_terms, 2 * bernoulli_order}; }

  static constexpr double kRiemannAtZero = -0.5;
  /// zeta_R'(0) = -log(2 pi) / 2.
  static double riemann_derivative_at_zero();
};

/// B_{2k} for k = 1..20.
double bernoulli_even(int k);

/// Log-gamma continued from the positive reals to Re z > 0 (Stirling series
/// after shifting z past 16).
Complex log_gamma(Complex z);

struct LerchCheck {
  double value_error = 0.0;       // |zeta_H(0, a) - (1/2 - a)|
  double derivative_error = 0.0;  // |zeta_H'(0, a) - (log Gamma(a) - log(2 pi) / 2)|
};

LerchCheck lerch_check(const ZetaEvaluator& z, Complex a);

}  // namespace reftor
