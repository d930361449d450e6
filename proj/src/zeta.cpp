#include "reftor/zeta.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "reftor/errors.hpp"

namespace reftor {

namespace {

constexpr std::array<double, 20> kBernoulli = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
};

}  // namespace

double bernoulli_even(int k) {
  if (k < 1 || k > static_cast<int>(kBernoulli.size())) throw DomainError("bernoulli_even: k out of range 1..20");
  return kBernoulli[k - 1];
}

double ZetaEvaluator::riemann_derivative_at_zero() { return -0.5 * std::log(2.0 * std::numbers::pi); }

ZetaValue ZetaEvaluator::hurwitz(Complex s, Complex a) const {
  if (!(a.real() > 0.0)) throw DomainError("hurwitz zeta needs Re a > 0");
  if (std::abs(s - 1.0) < 1e-14) throw DomainError("hurwitz zeta has a pole at s = 1");
  if (direct_terms < 1 || bernoulli_order < 1 || bernoulli_order > 20)
    throw DomainError("hurwitz zeta: direct_terms >= 1 and 1 <= bernoulli_order <= 20 required");

  ZetaValue out{0.0, 0.0};
  for (int n = 0; n < direct_terms; ++n) {
    const Complex l = std::log(Complex(n) + a);
    const Complex t = std::exp(-s * l);
    out.value += t;
    out.derivative -= l * t;
  }

  const Complex x = Complex(direct_terms) + a;
  const Complex lx = std::log(x);
  const Complex xs = std::exp(-s * lx);  // x^{-s}

  // integral tail x^{1-s} / (s - 1)
  const Complex tail = x * xs / (s - 1.0);
  out.value += tail;
  out.derivative += -lx * tail - tail / (s - 1.0);

  out.value += 0.5 * xs;
  out.derivative += -0.5 * lx * xs;

  // B_{2k}/(2k)! s (s+1) ... (s+2k-2) x^{-s-2k+1}; p and dp track the rising
  // product and its s-derivative.
  Complex p = s;
  Complex dp = 1.0;
  Complex xpow = xs / x;  // x^{-s-1}
  double factorial = 2.0;
  const Complex inv_x2 = 1.0 / (x * x);
  for (int k = 1; k <= bernoulli_order; ++k) {
    const double c = kBernoulli[k - 1] / factorial;
    out.value += c * p * xpow;
    out.derivative += c * (dp - lx * p) * xpow;
    const Complex f1 = s + double(2 * k - 1);
    const Complex f2 = s + double(2 * k);
    dp = dp * f1 * f2 + p * (f1 + f2);
    p *= f1 * f2;
    xpow *= inv_x2;
    factorial *= double(2 * k + 1) * double(2 * k + 2);
  }
  return out;
}

Complex log_gamma(Complex z) {
  if (!(z.real() > 0.0)) throw DomainError("log_gamma needs Re z > 0");
  Complex shift = 0.0;
  while (std::abs(z) < 16.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series = 0.0;
  Complex pw = inv;
  for (int k = 1; k <= 10; ++k) {
    series += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

LerchCheck lerch_check(const ZetaEvaluator& z, Complex a) {
  const ZetaValue v = z.hurwitz(0.0, a);
  LerchCheck out;
  out.value_error = std::abs(v.value - (0.5 - a));
  out.derivative_error = std::abs(v.derivative - (log_gamma(a) - 0.5 * std::log(2.0 * std::numbers::pi)));
  return out;
}

}  // namespace reftor
