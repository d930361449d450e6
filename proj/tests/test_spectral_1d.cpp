#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "reftor/cw_twisted.hpp"
#include "reftor/errors.hpp"
#include "reftor/spectral_1d.hpp"
#include "reftor/zeta.hpp"

using namespace reftor;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

CircleModel unitary(double theta, double length = 1.0) { return CircleModel{length, std::polar(1.0, theta), 1}; }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Complex closed_form_det(const CircleModel& m) {
  const Complex s = std::sin(0.5 * m.frequency());
  return 4.0 * s * s;
}

}  // namespace

TEST_CASE("Hurwitz zeta agrees with direct sums where they converge") {
  const ZetaEvaluator z;
  for (Complex s : {Complex(3.0), Complex(2.5, 1.0), Complex(4.0, -2.0), Complex(1.5, 0.3)})
    for (Complex a : {Complex(0.3), Complex(1.7), Complex(0.5, 0.4), Complex(0.05, -0.8)}) {
      const Complex expected = oracle::hurwitz_direct(s, a, 200000);
      CHECK(rel(z.hurwitz(s, a).value, expected) < 1e-10);
    }
}

TEST_CASE("Hurwitz zeta derivative matches finite differences") {
  const ZetaEvaluator z;
  const double h = 1e-3;
  for (Complex s : {Complex(0.0), Complex(0.3, 0.2), Complex(-1.5, 0.7), Complex(2.0, -1.0)})
    for (Complex a : {Complex(0.25), Complex(1.3, 0.6)}) {
      auto f = [&](double t) { return z.hurwitz(s + t, a).value; };
      const Complex fd = (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
      CHECK(rel(z.hurwitz(s, a).derivative, fd) < 1e-8);
    }
}

TEST_CASE("Hurwitz zeta input errors") {
  const ZetaEvaluator z;
  CHECK_THROWS_AS(z.hurwitz(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(z.hurwitz(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(z.hurwitz(0.0, Complex(-0.2, 1.0)), DomainError);
  CHECK_THROWS_AS(bernoulli_even(21), DomainError);
}

TEST_CASE("Bernoulli numbers reproduce zeta at even integers") {
  for (int k = 1; k <= 20; ++k) {
    // zeta(2k) = (-1)^{k+1} B_{2k} (2 pi)^{2k} / (2 (2k)!)
    const double zeta2k = oracle::hurwitz_direct(2.0 * k, 1.0, 20000).real();
    const double from_b = (k % 2 == 1 ? 1.0 : -1.0) * bernoulli_even(k) * std::pow(2.0 * kPi, 2 * k) /
                          (2.0 * std::tgamma(2.0 * k + 1.0));
    CHECK(std::abs(from_b - zeta2k) < 1e-12 * zeta2k);
  }
}

TEST_CASE("Lerch identity on 20 seeded parameters") {
  oracle::Rng rng(2024);
  const ZetaEvaluator z;
  for (int i = 0; i < 20; ++i) {
    const Complex a(rng.uniform(0.02, 1.98), rng.uniform(-1.0, 1.0));
    const ZetaValue v = z.hurwitz(0.0, a);
    CHECK(std::abs(v.value - (0.5 - a)) < 1e-12);
    const Complex lg = oracle::lanczos_log_gamma(a);
    CHECK(std::abs(v.derivative - (lg - 0.5 * std::log(2.0 * kPi))) < 1e-10);
    const LerchCheck c = lerch_check(z, a);
    CHECK(c.value_error < 1e-12);
    CHECK(c.derivative_error < 1e-10);
  }
  for (double a : {0.1, 0.5, 1.0, 1.9}) {
    CHECK(std::abs(z.hurwitz(0.0, a).derivative.real() - (std::lgamma(a) - 0.5 * std::log(2.0 * kPi))) < 1e-10);
    CHECK(std::abs(log_gamma(a).real() - std::lgamma(a)) < 1e-12);
  }
  CHECK(std::abs(z.hurwitz(0.0, 1.0).derivative.real() - ZetaEvaluator::riemann_derivative_at_zero()) < 1e-12);
  CHECK(std::abs(z.hurwitz(0.0, 1.0).value.real() - ZetaEvaluator::kRiemannAtZero) < 1e-14);
}

TEST_CASE("circle Laplace spectrum") {
  const std::vector<Complex> mu = circle_laplace_spectrum(unitary(kPi, 2.0 * kPi), 4);
  REQUIRE(mu.size() == 9);
  for (int n = -4; n <= 4; ++n) CHECK(std::abs(mu[n + 4] - (n + 0.5) * (n + 0.5)) < 1e-12);

  const std::vector<Complex> trivial = circle_laplace_spectrum(CircleModel{3.0, 1.0, 1}, 2);
  CHECK(std::abs(trivial[2]) == 0.0);

  for (Complex m : circle_laplace_spectrum(unitary(1.0), 5)) {
    CHECK(std::abs(m.imag()) < 1e-12);
    CHECK(m.real() >= 0.0);
  }
  for (Complex m : circle_laplace_spectrum(CircleModel{1.0, std::polar(2.0, 1.0), 1}, 3))
    CHECK(std::abs(m.imag()) > 1e-3);

  CHECK_THROWS_AS(circle_laplace_spectrum(unitary(1.0), 0), DomainError);
  CHECK_THROWS_AS(circle_laplace_spectrum(CircleModel{1.0, 0.0, 1}, 3), StructuralError);
  CHECK_THROWS_AS(circle_laplace_spectrum(CircleModel{-1.0, 2.0, 1}, 3), StructuralError);
}

TEST_CASE("zeta determinant of the circle Laplacian") {
  CHECK(std::abs(zeta_det_laplacian_circle(unitary(kPi)).value - 4.0) < 1e-8);
  CHECK(std::abs(zeta_det_laplacian_circle(unitary(2.0 * kPi / 3.0)).value - 3.0) < 1e-8);

  SUBCASE("spectral-product oracle") {
    for (const CircleModel& m : {unitary(kPi), unitary(2.0 * kPi / 3.0), unitary(0.4, 2.5),
                                 CircleModel{1.0, std::polar(2.0, 1.0), 1}, CircleModel{3.0, std::polar(0.6, 4.0), 1}}) {
      const Complex a = m.frequency() / (2.0 * kPi);
      const Complex det = zeta_det_laplacian_circle(m).value;
      CHECK(rel(det, oracle::circle_det_product(a, m.length, 200000)) < 1e-9);
      CHECK(rel(det, closed_form_det(m)) < 1e-10);
    }
  }
  SUBCASE("unitary holonomy gives |1 - lambda|^2") {
    for (double t : {0.3, 1.0, 2.0, 4.0, 6.0}) {
      const Complex det = zeta_det_laplacian_circle(unitary(t, 1.7)).value;
      CHECK(std::abs(det - std::norm(1.0 - std::polar(1.0, t))) < 1e-10);
    }
  }
  SUBCASE("approach to the trivial holonomy") {
    double previous = 1.0;
    for (double t : {1e-1, 1e-2, 1e-3}) {
      const double det = zeta_det_laplacian_circle(unitary(t)).value.real();
      CHECK(det < previous);
      CHECK(std::abs(det - 4.0 * std::pow(std::sin(0.5 * t), 2)) < 1e-12);
      previous = det;
    }
  }
  SUBCASE("trivial holonomy: zero mode excluded") {
    const LaplaceDeterminant d = zeta_det_laplacian_circle(CircleModel{2.5, 1.0, 1});
    CHECK(d.zero_modes == 1);
    CHECK(std::abs(d.value - 2.5 * 2.5) < 1e-10);
    CHECK(std::abs(d.zeta_at_zero + 1.0) < 1e-14);
  }
  SUBCASE("cutoff stability") {
    const ZetaEvaluator base;
    for (const CircleModel& m : {unitary(kPi), unitary(0.1, 7.0), CircleModel{2.0, std::polar(3.0, 2.5), 1}}) {
      const Complex a = zeta_det_laplacian_circle(m, base).value;
      const Complex b = zeta_det_laplacian_circle(m, base.refined()).value;
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
  CHECK_THROWS_AS(zeta_det_laplacian_circle(CircleModel{1.0, 3.0, 1}), DomainError);
}

TEST_CASE("eta invariant of the circle") {
  CHECK(eta_circle(unitary(kPi)) == Complex(0.0));
  CHECK(std::abs(eta_circle(unitary(kPi / 2.0)) - 0.5) < 1e-10);
  CHECK(std::abs(eta_circle(unitary(1e-9)) - 1.0) < 1e-8);
  CHECK(eta_circle(CircleModel{1.0, 1.0, 1}) == Complex(0.0));
  for (double t : {0.2, 1.0, 2.5, 3.0, 5.9}) {
    CHECK(std::abs(eta_circle(unitary(t)) - (1.0 - t / kPi)) < 1e-12);
    CHECK(std::abs(eta_circle(unitary(t)) + eta_circle(unitary(2.0 * kPi - t))) < 1e-12);
  }
  const CircleModel m{1.0, std::polar(0.3, 2.0), 1};
  CHECK(std::abs(eta_circle(m) - (1.0 - m.frequency() / kPi)) < 1e-12);
}

TEST_CASE("graded determinant of the circle") {
  SUBCASE("theta = pi") {
    const CircleGradedDeterminant g = graded_det_circle(unitary(kPi));
    CHECK(std::abs(g.eta) < 1e-15);
    CHECK(std::abs(g.value.imag()) < 1e-12);
    CHECK(std::abs(std::norm(g.value) - 4.0) < 1e-10);
  }
  SUBCASE("modulus against the Laplace determinant") {
    for (double t : {kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0}) {
      const Complex g = graded_det_circle(unitary(t, 1.3)).value;
      CHECK(std::abs(std::norm(g) - zeta_det_laplacian_circle(unitary(t, 1.3)).value.real()) < 1e-8);
      CHECK(std::abs(std::norm(g) - 4.0 * std::pow(std::sin(0.5 * t), 2)) < 1e-8);
    }
  }
  SUBCASE("equals 1 - lambda and does not see L") {
    for (Complex lambda : {std::polar(1.0, 1.0), std::polar(0.5, 2.0), std::polar(1.8, 4.5), Complex(-3.0, 0.0)})
      for (double length : {0.5, 1.0, 6.0}) {
        const Complex g = graded_det_circle(CircleModel{length, lambda, 1}).value;
        CHECK(rel(g, 1.0 - lambda) < 1e-10);
      }
  }
  SUBCASE("conjugate holonomy") {
    for (Complex lambda : {std::polar(1.0, 0.7), std::polar(0.4, 2.2), std::polar(2.5, 5.0)}) {
      const Complex g = graded_det_circle(CircleModel{1.0, lambda, 1}).value;
      const Complex gc = graded_det_circle(CircleModel{1.0, std::conj(lambda), 1}).value;
      CHECK(rel(gc, std::conj(g)) < 1e-10);
    }
  }
  SUBCASE("ray that does not separate the spectrum") {
    // a_plus has argument about -1.41 here
    const CircleModel m{1.0, std::polar(std::exp(20.0), kPi), 1};
    CHECK_NOTHROW(graded_det_circle(m, -1.5));
    CHECK_THROWS_AS(graded_det_circle(m, -1.0), AgmonError);
    CHECK_THROWS_AS(graded_det_circle(unitary(1.0), 0.5), AgmonError);
    CHECK_THROWS_AS(graded_det_circle(CircleModel{1.0, 1.0, 1}), DomainError);
  }
}

TEST_CASE("interval determinants") {
  const IntervalDeterminant a = interval_det(IntervalModel{kPi, BoundaryCondition::relative});
  CHECK(std::abs(a.value - 2.0 * kPi) < 1e-10);
  CHECK(a.zero_modes == 0);
  CHECK(std::abs(interval_det(IntervalModel{0.5, BoundaryCondition::relative}).value - 1.0) < 1e-10);
  const IntervalDeterminant b = interval_det(IntervalModel{1.0, BoundaryCondition::absolute});
  CHECK(std::abs(b.value - 2.0) < 1e-10);
  CHECK(b.zero_modes == 1);
  CHECK_THROWS_AS(interval_det(IntervalModel{0.0, BoundaryCondition::relative}), StructuralError);
}

TEST_CASE("Lesch gluing factor on the circle") {
  for (auto [l1, l2] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.5}, std::pair{1.5, 0.5}, std::pair{0.1, 3.0}}) {
    const LeschCheck c = gluing_check_lesch(l1, l2);
    CHECK(c.residual < 1e-6);
    CHECK(std::abs(c.expected - std::log(2.0)) < 1e-15);
    CHECK(std::abs(c.phi_modulus - 1.0) < 1e-12);
    for (double scale : {0.3, 7.0}) {
      const LeschCheck s = gluing_check_lesch(scale * l1, scale * l2);
      CHECK(std::abs(s.residual - c.residual) < 1e-9);
    }
  }
  CHECK_THROWS_AS(gluing_check_lesch(0.0, 1.0), DomainError);
}

TEST_CASE("gluing constant K") {
  CHECK(std::abs(gluing_constant_K(0.0, 0.0, 0.0, 2) - 4.0) < 1e-15);
  CHECK(std::abs(gluing_constant_K(0.7, 0.2, 0.5, 2) - 4.0) < 1e-14);
  CHECK(std::abs(gluing_constant_K(1.0, 0.0, 0.0, 0) + 1.0) < 1e-15);
  const Complex em = eta_circle(unitary(1.0));
  const Complex e1 = eta_circle(unitary(2.0));
  const Complex e2 = eta_circle(CircleModel{1.0, std::polar(0.5, 3.0), 1});
  const Complex direct = 2.0 * std::exp(kI * kPi * ((1.0 - 1.0 / kPi) - (1.0 - 2.0 / kPi) -
                                                    (1.0 - Complex(3.0, std::log(2.0)) / kPi)));
  CHECK(rel(gluing_constant_K(em, e1, e2, 1), direct) < 1e-12);
}

TEST_CASE("the eta factor of K^2 is holomorphic in the holonomy") {
  const auto curve = [](Complex z) { return 2.0 * kI + z; };
  const double r = K_squared_holomorphy(curve, 0.0);
  CHECK(r < 1e-7);
  const double r1 = K_squared_holomorphy(curve, 0.0, 1e-3);
  const double r2 = K_squared_holomorphy(curve, 0.0, 5e-4);
  CHECK(std::log2(r1 / r2) > 1.8);
  // exp(2 pi i eta) = lambda^{-2}
  const Complex l = 2.0 * kI + 0.1;
  CHECK(rel(std::exp(2.0 * kPi * kI * eta_circle(CircleModel{1.0, l, 1})), 1.0 / (l * l)) < 1e-12);

  CHECK(K_squared_holomorphy([](Complex) { return Complex(0.0, 2.0); }, 0.0) == 0.0);
  CHECK(K_squared_holomorphy([](Complex z) { return 2.0 * kI + std::conj(z); }, 0.0) > 1e-2);
  CHECK_THROWS_AS(K_squared_holomorphy([](Complex z) { return 1.0 + z; }, 0.0), DomainError);
}

TEST_CASE("refined analytic torsion of the circle") {
  SUBCASE("trivial-bundle constants") {
    const CircleAnalyticTorsion t = rat_circle(unitary(1.0));
    CHECK(std::abs(t.eta_trivial) < 1e-15);
    CHECK(std::abs(t.xi_hat - 0.5) < 1e-14);
  }
  SUBCASE("modulus does not depend on the circumference") {
    for (double t : {0.5, kPi / 2.0, 4.0}) {
      const double base = std::abs(rat_circle(unitary(t, 1.0)).value);
      for (double length : {2.0 * kPi, 5.0}) CHECK(std::abs(std::abs(rat_circle(unitary(t, length)).value) - base) < 1e-12);
    }
  }
  SUBCASE("theta = pi: real after removing the xi_hat phase") {
    const CircleAnalyticTorsion t = rat_circle(unitary(kPi));
    const Complex stripped = t.value * std::exp(-kI * kPi * t.xi_hat);
    CHECK(std::abs(stripped.imag()) < 1e-12);
    CHECK(std::abs(std::abs(stripped) - 2.0) < 1e-12);
  }
  SUBCASE("modulus matches the combinatorial torsion") {
    const CWData k = fixtures::circle();
    for (double t : {kPi / 3.0, kPi / 2.0, kPi}) {
      Representation rho = trivial_representation(k, 1);
      rho.generators.at("t")(0, 0) = std::polar(1.0, t);
      const Complex tau = sigma(k, rho).coordinate;
      CHECK(std::abs(std::abs(rat_circle(unitary(t)).value) - std::abs(tau)) < 1e-7);
      CHECK(std::abs(std::abs(tau) - std::abs(std::polar(1.0, t) - 1.0)) < 1e-12);
    }
  }
}
