#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "reftor/errors.hpp"
#include "reftor/temporal_gauge.hpp"

using namespace reftor;

namespace {

ComplexMatrix zero(int n) { return ComplexMatrix::Zero(n, n); }

ComplexMatrix scaled_to_norm(ComplexMatrix a, double target) {
  const double n = Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
  return a * (target / n);
}

// Reference exponential by Taylor series with scaling and squaring, so the
// tests do not lean on the library's expm.
ComplexMatrix taylor_exp(const ComplexMatrix& a) {
  int squarings = 0;
  double norm = a.norm();
  while (norm > 0.1) {
    norm /= 2.0;
    ++squarings;
  }
  const ComplexMatrix b = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(a.rows(), a.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k < 20; ++k) {
    term = (term * b / double(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

double max_error_against(const GaugeTransformation& g, const GaugeField& w,
                         const std::function<ComplexMatrix(double)>& exact) {
  double worst = 0.0;
  for (int iy = 0; iy < w.ny; ++iy)
    for (int ix = 0; ix < w.nx; ++ix) worst = std::max(worst, (g.at(ix, iy) - exact(w.x(ix))).norm());
  return worst;
}

GaugeField constant_field(const ComplexMatrix& a, double eps, int nx, int ny) {
  const int n = a.rows();
  return GaugeField::sample(eps, nx, ny, n, [a](double, double) { return a; },
                            [n](double, double) { return zero(n); });
}

// Smooth field with curvature, for covariance checks.
GaugeField generic_field(oracle::Rng& rng, int n, int nx, int ny) {
  const ComplexMatrix a = 0.5 * rng.matrix(n, n), b = 0.5 * rng.matrix(n, n), c = 0.5 * rng.matrix(n, n);
  return GaugeField::sample(
      0.5, nx, ny, n, [a, b](double x, double y) { return ComplexMatrix(std::cos(x + y) * a + x * y * b); },
      [b, c](double x, double y) { return ComplexMatrix(std::sin(2.0 * x - y) * c + y * b); });
}

}  // namespace

TEST_CASE("gauge ODE with constant omega_0") {
  oracle::Rng rng(5);
  const ComplexMatrix a = scaled_to_norm(rng.matrix(3, 3), 1.0);
  const GaugeField w = constant_field(a, 0.5, 5, 5);
  const GaugeTransformation g = solve_gauge_ode(w, 200);
  CHECK(max_error_against(g, w, [&](double x) { return taylor_exp(-x * a); }) < 1e-10);
  for (int iy = 0; iy < w.ny; ++iy) CHECK(g.at(w.origin(), iy) == ComplexMatrix::Identity(3, 3));

  SUBCASE("fourth-order convergence") {
    const ComplexMatrix big = scaled_to_norm(rng.matrix(3, 3), 3.0);
    const GaugeField wb = constant_field(big, 0.5, 5, 5);
    const ComplexMatrix exact = taylor_exp(-0.5 * big);
    double previous = 0.0;
    for (int steps : {4, 8, 16, 32}) {
      const double err = (solve_gauge_ode(wb, steps).at(wb.nx - 1, 0) - exact).norm();
      if (previous > 0.0) CHECK(previous / err >= 14.0);
      previous = err;
    }
  }
  SUBCASE("sampled omega_0 without a callable") {
    GaugeField s = constant_field(a, 0.5, 9, 5);
    s.omega0_fn = nullptr;
    CHECK(max_error_against(solve_gauge_ode(s, 200), s, [&](double x) { return taylor_exp(-x * a); }) < 1e-10);
  }
}

TEST_CASE("gauge ODE special cases") {
  const GaugeField w = constant_field(zero(2), 0.5, 7, 5);
  for (const auto& m : solve_gauge_ode(w, 10).gamma) CHECK(m == ComplexMatrix::Identity(2, 2));

  SUBCASE("commuting family against quadrature") {
    oracle::Rng rng(8);
    const ComplexMatrix a = rng.matrix(2, 2);
    auto f = [](double x) { return std::cos(3.0 * x) + x * x; };
    const GaugeField c = GaugeField::sample(
        0.5, 11, 5, 2, [a, f](double x, double) { return ComplexMatrix(f(x) * a); },
        [](double, double) { return zero(2); });
    auto simpson = [&](double x) {
      const int n = 2000;
      const double h = x / n;
      double s = f(0.0) + f(x);
      for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
      return s * h / 3.0;
    };
    const GaugeTransformation g = solve_gauge_ode(c, 400);
    CHECK(max_error_against(g, c, [&](double x) { return taylor_exp(-simpson(x) * a); }) < 1e-9);
  }
  SUBCASE("singular gamma") {
    ComplexMatrix big(1, 1);
    big(0, 0) = 60.0;
    CHECK_THROWS_AS(solve_gauge_ode(constant_field(big, 0.5, 5, 5), 400), IntegrationError);
  }
  SUBCASE("invalid grids") {
    GaugeField bad = w;
    bad.nx = 6;
    CHECK_THROWS_AS(solve_gauge_ode(bad, 10), StructuralError);
    CHECK_THROWS_AS(solve_gauge_ode(w, 0), DomainError);
  }
}

TEST_CASE("gauge transformation law") {
  oracle::Rng rng(13);
  const GaugeField w = generic_field(rng, 2, 81, 81);

  SUBCASE("identity") {
    GaugeTransformation id{w.epsilon, w.nx, w.ny, std::vector<ComplexMatrix>(w.omega0.size(), ComplexMatrix::Identity(2, 2))};
    const GaugeField t = gauge_transform(w, id);
    for (size_t k = 0; k < w.omega0.size(); ++k) {
      CHECK(t.omega0[k] == w.omega0[k]);
      CHECK(t.omega_y[k] == w.omega_y[k]);
    }
  }
  SUBCASE("group law") {
    const PolynomialGauge p = random_polynomial_gauge(3, 2);
    GaugeTransformation g{w.epsilon, w.nx, w.ny, {}};
    for (int iy = 0; iy < w.ny; ++iy)
      for (int ix = 0; ix < w.nx; ++ix) g.gamma.push_back(p.value(w.x(ix), w.y(iy)));
    const GaugeField back = gauge_transform(gauge_transform(w, g), g.inverse());
    double worst = 0.0;
    for (size_t k = 0; k < w.omega0.size(); ++k)
      worst = std::max({worst, (back.omega0[k] - w.omega0[k]).norm(), (back.omega_y[k] - w.omega_y[k]).norm()});
    CHECK(worst < 1e-8);
  }
  SUBCASE("the ODE solution removes omega_0") {
    // finite-difference floor: 4th order in the grid step
    const double coarse = temporal_residual(gauge_transform(w, solve_gauge_ode(w, 200))).omega0_sup;
    oracle::Rng same(13);
    const GaugeField fine = generic_field(same, 2, 161, 161);
    const double refined = temporal_residual(gauge_transform(fine, solve_gauge_ode(fine, 400))).omega0_sup;
    CHECK(coarse < 1e-6);
    CHECK(refined < 1e-7);
    CHECK(coarse / refined > 14.0);
  }
  SUBCASE("grid mismatch") {
    const GaugeField other = generic_field(rng, 2, 41, 81);
    CHECK_THROWS_AS(gauge_transform(w, solve_gauge_ode(other, 20)), StructuralError);
  }
}

TEST_CASE("curvature and temporal residuals") {
  const GaugeField flat0 = constant_field(zero(2), 0.5, 9, 9);
  CHECK(curvature_residual(flat0) == 0.0);

  oracle::Rng rng(21);
  const ComplexMatrix a = rng.matrix(2, 2), b = rng.matrix(2, 2);
  const GaugeField pullback = GaugeField::sample(
      0.5, 9, 17, 2, [](double, double) { return zero(2); },
      [b](double, double y) { return ComplexMatrix(std::sin(y) * b); });
  CHECK(curvature_residual(pullback) < 1e-12);
  const TemporalResidual tp = temporal_residual(pullback);
  CHECK(tp.omega0_sup == 0.0);
  CHECK(tp.dx_omega_sup < 1e-12);

  const GaugeField bracket = GaugeField::sample(
      0.5, 9, 9, 2, [a](double x, double) { return ComplexMatrix(x * a); },
      [b](double, double y) { return ComplexMatrix(y * b); });
  const double expected = 0.5 * (a * b - b * a).norm();
  CHECK(std::abs(curvature_residual(bracket) - expected) < 1e-10 * expected);
  CHECK(temporal_residual(bracket).omega0_sup > 0.1);
}

TEST_CASE("monodromy") {
  const GaugeField flat0 = constant_field(zero(2), 0.5, 9, 9);
  CHECK((monodromy(flat0, rectangle_loop(4, 0, 8, 8)) - ComplexMatrix::Identity(2, 2)).norm() == 0.0);

  SUBCASE("abelian loop integral") {
    const Complex a(0.7, -0.3), b(-0.4, 1.1);
    const GaugeField w = GaugeField::sample(
        0.5, 81, 81, 1,
        [a](double x, double y) { return ComplexMatrix::Constant(1, 1, a * std::cos(x + 2.0 * y)); },
        [b](double x, double y) { return ComplexMatrix::Constant(1, 1, b * x * y * y); });
    const ComplexMatrix mon = monodromy(w, rectangle_loop(w.origin(), 0, w.nx - 1, w.ny - 1));
    const double eps = 0.5;
    const Complex integral = a * std::sin(eps) + b * eps / 3.0 - a * (std::sin(eps + 2.0) - std::sin(2.0));
    CHECK(std::abs(mon(0, 0) - std::exp(-integral)) < 1e-9);
  }
  SUBCASE("gauge covariance") {
    oracle::Rng rng(34);
    for (int trial = 0; trial < 3; ++trial) {
      const GaugeField w = generic_field(rng, 2, 81, 81);
      const GaugeTransformation g = solve_gauge_ode(w, 200);
      const GaugeField t = gauge_transform(w, g);
      const GridPath on_axis = rectangle_loop(w.origin(), 10, w.nx - 1, 60);
      CHECK((monodromy(t, on_axis) - monodromy(w, on_axis)).norm() < 1e-7);
      const GridPath off_axis = rectangle_loop(60, 5, 75, 70);
      const ComplexMatrix& gb = g.at(60, 5);
      const ComplexMatrix expected = gb.inverse() * monodromy(w, off_axis) * gb;
      CHECK((monodromy(t, off_axis) - expected).norm() < 1e-7);
      CHECK((monodromy(w, off_axis) - ComplexMatrix::Identity(2, 2)).norm() > 1e-3);
    }
  }
  SUBCASE("path errors") {
    GridPath open = rectangle_loop(0, 0, 2, 2);
    open.pop_back();
    CHECK_THROWS_AS(monodromy(flat0, open), StructuralError);
    CHECK_THROWS_AS(monodromy(flat0, GridPath{{0, 0}, {2, 0}, {0, 0}}), StructuralError);
    CHECK_THROWS_AS(monodromy(flat0, GridPath{{0, 0}, {0, 9}, {0, 0}}), StructuralError);
  }
}

TEST_CASE("temporal gauge pipeline on pure-gauge fields") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GaugeField w = random_polynomial_gauge(seed, 2 + seed % 2).pure_gauge(0.5, 81, 81);
    const GaugePipeline p = run_gauge_pipeline(w, 200);
    CHECK(p.before.omega0_sup > 1e-2);
    CHECK(p.after.omega0_sup < 1e-7);
    CHECK(p.after.dx_omega_sup < 1e-7);
    CHECK(p.curvature_before < 1e-6);
    CHECK(std::abs(p.curvature_after - p.curvature_before) < 1e-6);
    CHECK(p.monodromy_eigen_deviation < 1e-6);
    CHECK(p.monodromy_deviation < 1e-7);
  }
}

TEST_CASE("random polynomial gauges stay invertible") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PolynomialGauge g = random_polynomial_gauge(seed, 3, 3, 0.6);
    for (double x : {-0.5, 0.0, 0.5})
      for (double y : {0.0, 0.5, 1.0}) {
        const double smin = Eigen::JacobiSVD<ComplexMatrix>(g.value(x, y)).singularValues().minCoeff();
        CHECK(smin > 0.39);
      }
  }
  CHECK(random_polynomial_gauge(7, 2).terms.size() == 5);
  CHECK_THROWS_AS(random_polynomial_gauge(1, 0), DomainError);
}
